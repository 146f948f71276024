/**
 * Browser wiring: menu forms, canvas rendering, click capture.
 *
 * The canvas shows the current image aspect-preserved; during enrollment
 * everything outside the persuasive viewport is darkened and a shuffle
 * button redraws it. Clicks are mapped back to original image pixels
 * before they leave the browser; padding clicks never become requests.
 */

import { ClickpassApi, ApiError } from "./api.js";
import { fitContain, mapDisplayToImage, viewportToDisplayRect } from "./coords.js";
import {
  applyClick,
  applyShuffle,
  progressLabel,
  screenFromStart,
  type ActiveScreen,
  type Screen,
} from "./session.js";

const api = new ClickpassApi("");

const menu = document.querySelector<HTMLElement>("#menu")!;
const stage = document.querySelector<HTMLElement>("#stage")!;
const canvas = document.querySelector<HTMLCanvasElement>("#board")!;
const status = document.querySelector<HTMLElement>("#status")!;
const notice = document.querySelector<HTMLElement>("#notice")!;
const shuffleBtn = document.querySelector<HTMLButtonElement>("#shuffle")!;
const backBtn = document.querySelector<HTMLButtonElement>("#back")!;

let screen: Screen | null = null;
let image: HTMLImageElement | null = null;

function show(el: HTMLElement, visible: boolean): void {
  el.style.display = visible ? "" : "none";
}

function setNotice(text: string | null): void {
  notice.textContent = text ?? "";
  show(notice, text !== null);
}

async function loadImage(ref: string): Promise<HTMLImageElement> {
  const img = new Image();
  img.src = api.imageUrl(ref);
  await img.decode();
  return img;
}

function draw(active: ActiveScreen): void {
  const ctx = canvas.getContext("2d")!;
  const display = { width: canvas.width, height: canvas.height };
  const imageSize = { width: active.imageWidth, height: active.imageHeight };
  const fit = fitContain(display, imageSize);
  ctx.fillStyle = "#111";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (image) {
    ctx.drawImage(image, fit.offsetX, fit.offsetY, fit.drawWidth, fit.drawHeight);
  }
  if (active.mode === "enroll" && active.viewport) {
    const r = viewportToDisplayRect(active.viewport, display, imageSize);
    ctx.save();
    ctx.fillStyle = "rgba(0, 0, 0, 0.62)";
    ctx.beginPath();
    ctx.rect(0, 0, canvas.width, canvas.height);
    ctx.rect(r.x, r.y, r.width, r.height);
    ctx.fill("evenodd");
    ctx.strokeStyle = "#7fd77f";
    ctx.lineWidth = 2;
    ctx.strokeRect(r.x, r.y, r.width, r.height);
    ctx.restore();
  }
  status.textContent = progressLabel(active);
  setNotice(active.notice);
  show(shuffleBtn, active.mode === "enroll");
}

async function render(): Promise<void> {
  if (screen === null) {
    show(menu, true);
    show(stage, false);
    return;
  }
  show(menu, false);
  show(stage, true);
  if (screen.kind === "verdict") {
    status.textContent = "";
    show(shuffleBtn, false);
    setNotice(
      screen.verdict === "SUCCESS"
        ? "Login successful."
        : "No match found. Returning to login…",
    );
    if (screen.verdict === "NO_MATCH_FOUND") {
      // failed logins loop back to the start of the flow
      setTimeout(() => {
        screen = null;
        void render();
      }, 1800);
    }
    return;
  }
  if (screen.kind === "enrolled") {
    status.textContent = "";
    show(shuffleBtn, false);
    setNotice(`Account ${screen.userId} created. You can log in now.`);
    setTimeout(() => {
      screen = null;
      void render();
    }, 1800);
    return;
  }
  image = await loadImage(screen.imageRef);
  draw(screen);
}

function fail(err: unknown): void {
  const message =
    err instanceof ApiError ? `${err.body.error}: ${err.message}` : String(err);
  setNotice(message);
}

canvas.addEventListener("click", async (ev) => {
  if (!screen || screen.kind !== "active") return;
  const rect = canvas.getBoundingClientRect();
  const point = mapDisplayToImage(
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    { width: canvas.width, height: canvas.height },
    { width: screen.imageWidth, height: screen.imageHeight },
  );
  if (point === null) return; // letterbox padding
  try {
    const resp = await api.click(screen.sessionId, point.x, point.y, screen.nonce);
    screen = applyClick(screen, resp);
    await render();
  } catch (err) {
    fail(err);
  }
});

shuffleBtn.addEventListener("click", async () => {
  if (!screen || screen.kind !== "active" || screen.mode !== "enroll") return;
  try {
    screen = applyShuffle(screen, await api.shuffle(screen.sessionId));
    await render();
  } catch (err) {
    fail(err);
  }
});

backBtn.addEventListener("click", () => {
  screen = null;
  void render();
});

document.querySelector<HTMLFormElement>("#signup-form")!.addEventListener(
  "submit",
  async (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const data = new FormData(form);
    try {
      const resp = await api.signup({
        user_id: String(data.get("user_id")),
        t: Number(data.get("t")),
        c: Number(data.get("c")),
        security_question: String(data.get("question")),
        answer: String(data.get("answer")),
        reset_token: String(data.get("reset_token") || "") || undefined,
      });
      screen = screenFromStart("enroll", resp);
      await render();
    } catch (err) {
      fail(err);
    }
  },
);

document.querySelector<HTMLFormElement>("#login-form")!.addEventListener(
  "submit",
  async (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    try {
      const resp = await api.loginStart(String(data.get("user_id")));
      screen = screenFromStart("login", resp);
      await render();
    } catch (err) {
      fail(err);
    }
  },
);

document.querySelector<HTMLFormElement>("#forgot-form")!.addEventListener(
  "submit",
  async (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    try {
      const resp = await api.forgot(
        String(data.get("user_id")),
        String(data.get("answer")),
      );
      setNotice(
        resp.status === "ok"
          ? `Reset token (paste into sign-up): ${resp.reset_token}`
          : "Request denied.",
      );
    } catch (err) {
      fail(err);
    }
  },
);

void render();

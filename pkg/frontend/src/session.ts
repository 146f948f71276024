/**
 * Screen state machine: API responses in, render models out.
 *
 * Pure functions so the rules are testable without a DOM. Two rules are
 * deliberate and load-bearing: login screens carry no correctness
 * information until the final verdict (the image itself is the only cue),
 * and no screen ever retains click coordinates.
 */

import type {
  ClickResponse,
  SessionStartResponse,
  ShuffleResponse,
  ViewportRect,
} from "./api.js";

export type Mode = "enroll" | "login";

export interface ActiveScreen {
  kind: "active";
  mode: Mode;
  sessionId: string;
  nonce: string;
  imageRef: string;
  imageWidth: number;
  imageHeight: number;
  /** present during enrollment only: the click must land inside */
  viewport: ViewportRect | null;
  /** clicks completed so far (never which were "right") */
  position: number;
  total: number;
  /** transient banner, e.g. the outside-viewport bounce */
  notice: string | null;
}

export interface VerdictScreen {
  kind: "verdict";
  verdict: "SUCCESS" | "NO_MATCH_FOUND";
}

export interface EnrolledScreen {
  kind: "enrolled";
  userId: string;
}

export type Screen = ActiveScreen | VerdictScreen | EnrolledScreen;

export function screenFromStart(
  mode: Mode,
  resp: SessionStartResponse,
): ActiveScreen {
  return {
    kind: "active",
    mode,
    sessionId: resp.session_id,
    nonce: resp.nonce,
    imageRef: resp.first_image_ref,
    imageWidth: resp.image_width,
    imageHeight: resp.image_height,
    viewport: mode === "enroll" ? resp.viewport ?? null : null,
    position: resp.position,
    total: resp.clicks_required,
    notice: null,
  };
}

export function applyClick(prev: ActiveScreen, resp: ClickResponse): Screen {
  if ("verdict" in resp) {
    return { kind: "verdict", verdict: resp.verdict };
  }
  if (resp.status === "enrolled") {
    return { kind: "enrolled", userId: resp.user_id };
  }
  if (resp.status === "rejected_outside_viewport") {
    return {
      ...prev,
      nonce: resp.nonce,
      position: resp.position,
      viewport: resp.viewport,
      notice: "Click inside the highlighted area (or shuffle it).",
    };
  }
  return {
    ...prev,
    nonce: resp.nonce,
    position: resp.position,
    imageRef: resp.next_image_ref,
    imageWidth: resp.image_width,
    imageHeight: resp.image_height,
    viewport: prev.mode === "enroll" ? resp.viewport ?? null : null,
    notice: null,
  };
}

export function applyShuffle(prev: ActiveScreen, resp: ShuffleResponse): ActiveScreen {
  return { ...prev, viewport: resp.viewport, position: resp.position, notice: null };
}

/** Progress label: position only, never correctness. */
export function progressLabel(screen: ActiveScreen): string {
  return `click ${Math.min(screen.position + 1, screen.total)} of ${screen.total}`;
}

/** Typed client for the clickpass JSON API. */

export interface ViewportRect {
  x0: number;
  y0: number;
  side: number;
}

export interface SessionStartResponse {
  session_id: string;
  first_image_ref: string;
  image_width: number;
  image_height: number;
  viewport?: ViewportRect;
  nonce: string;
  position: number;
  clicks_required: number;
}

export interface ClickProgressResponse {
  status: "ok";
  position: number;
  next_image_ref: string;
  image_width: number;
  image_height: number;
  viewport?: ViewportRect;
  nonce: string;
}

export interface ClickRejectedResponse {
  status: "rejected_outside_viewport";
  position: number;
  viewport: ViewportRect;
  nonce: string;
}

export interface EnrolledResponse {
  status: "enrolled";
  user_id: string;
}

export interface VerdictResponse {
  verdict: "SUCCESS" | "NO_MATCH_FOUND";
}

export type ClickResponse =
  | ClickProgressResponse
  | ClickRejectedResponse
  | EnrolledResponse
  | VerdictResponse;

export interface ShuffleResponse {
  viewport: ViewportRect;
  position: number;
}

export type ForgotResponse =
  | { status: "ok"; reset_token: string }
  | { status: "denied" };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: { error?: string; message?: string },
  ) {
    super(body.message ?? `HTTP ${status}`);
  }
}

export class ClickpassApi {
  constructor(readonly baseUrl: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const json = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, json);
    }
    return json as T;
  }

  signup(req: {
    user_id: string;
    t: number;
    c: number;
    security_question: string;
    answer: string;
    reset_token?: string;
  }): Promise<SessionStartResponse> {
    return this.post("/api/signup", req);
  }

  loginStart(userId: string): Promise<SessionStartResponse> {
    return this.post("/api/session/login", { user_id: userId });
  }

  click(sessionId: string, x: number, y: number, nonce: string): Promise<ClickResponse> {
    return this.post("/api/click", { session_id: sessionId, x, y, nonce });
  }

  shuffle(sessionId: string): Promise<ShuffleResponse> {
    return this.post("/api/shuffle", { session_id: sessionId });
  }

  forgot(userId: string, answer: string): Promise<ForgotResponse> {
    return this.post("/api/forgot", { user_id: userId, answer });
  }

  imageUrl(ref: string): string {
    return this.baseUrl + ref;
  }
}

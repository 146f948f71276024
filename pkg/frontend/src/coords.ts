/**
 * Display <-> image coordinate mapping.
 *
 * The server only understands original image pixels; the browser renders
 * the image aspect-preserved inside a display box (letterboxed as needed)
 * and must invert that scaling for every click. All arithmetic here is
 * exact integer math: products stay far below 2^53, and rounding is
 * half-away-from-zero, so results are reproducible bit-for-bit.
 */

export interface Size {
  width: number;
  height: number;
}

export interface Fit {
  drawWidth: number;
  drawHeight: number;
  offsetX: number;
  offsetY: number;
}

function assertPositiveIntegerSize(s: Size, label: string): void {
  if (
    !Number.isInteger(s.width) || !Number.isInteger(s.height) ||
    s.width < 1 || s.height < 1
  ) {
    throw new RangeError(`${label} must have positive integer dimensions`);
  }
}

/** Aspect-preserving containment of the image in the display box. */
export function fitContain(display: Size, image: Size): Fit {
  assertPositiveIntegerSize(display, "display");
  assertPositiveIntegerSize(image, "image");
  let drawWidth: number;
  let drawHeight: number;
  if (display.width * image.height <= display.height * image.width) {
    // width-limited: fill the display width
    drawWidth = display.width;
    drawHeight = Math.floor((image.height * display.width) / image.width);
  } else {
    drawHeight = display.height;
    drawWidth = Math.floor((image.width * display.height) / image.height);
  }
  drawWidth = Math.max(1, drawWidth);
  drawHeight = Math.max(1, drawHeight);
  return {
    drawWidth,
    drawHeight,
    offsetX: Math.floor((display.width - drawWidth) / 2),
    offsetY: Math.floor((display.height - drawHeight) / 2),
  };
}

/** Round n/d half away from zero; n, d integers, d > 0. */
function divRoundHalfAway(n: number, d: number): number {
  if (n >= 0) {
    return Math.floor((2 * n + d) / (2 * d));
  }
  return -Math.floor((2 * -n + d) / (2 * d));
}

export interface ImagePoint {
  x: number;
  y: number;
}

/**
 * Map a click in display coordinates to the original image pixel, or null
 * when the click landed on letterbox padding. The result is clamped into
 * image bounds (an extreme upscale can round the last pixel out).
 */
export function mapDisplayToImage(
  clickX: number,
  clickY: number,
  display: Size,
  image: Size,
): ImagePoint | null {
  const fit = fitContain(display, image);
  const relX = Math.round(clickX) - fit.offsetX;
  const relY = Math.round(clickY) - fit.offsetY;
  if (relX < 0 || relX >= fit.drawWidth || relY < 0 || relY >= fit.drawHeight) {
    return null;
  }
  const x = divRoundHalfAway(relX * image.width, fit.drawWidth);
  const y = divRoundHalfAway(relY * image.height, fit.drawHeight);
  return {
    x: Math.min(Math.max(x, 0), image.width - 1),
    y: Math.min(Math.max(y, 0), image.height - 1),
  };
}

/**
 * A display coordinate that maps back to the given image pixel: the
 * largest display position still inside the pixel's half-open acceptance
 * interval under the inverse map (exact round trip whenever the image is
 * shown at or above its native size).
 */
export function imageToDisplay(
  x: number,
  y: number,
  display: Size,
  image: Size,
): { x: number; y: number } {
  const fit = fitContain(display, image);
  return {
    x: fit.offsetX + Math.floor(((2 * x + 1) * fit.drawWidth - 1) / (2 * image.width)),
    y: fit.offsetY + Math.floor(((2 * y + 1) * fit.drawHeight - 1) / (2 * image.height)),
  };
}

/** Display-space rectangle of an image-space viewport (for shading). */
export function viewportToDisplayRect(
  viewport: { x0: number; y0: number; side: number },
  display: Size,
  image: Size,
): { x: number; y: number; width: number; height: number } {
  const fit = fitContain(display, image);
  const x0 = fit.offsetX + Math.floor((viewport.x0 * fit.drawWidth) / image.width);
  const y0 = fit.offsetY + Math.floor((viewport.y0 * fit.drawHeight) / image.height);
  const x1 =
    fit.offsetX +
    Math.ceil(((viewport.x0 + viewport.side) * fit.drawWidth) / image.width);
  const y1 =
    fit.offsetY +
    Math.ceil(((viewport.y0 + viewport.side) * fit.drawHeight) / image.height);
  return { x: x0, y: y0, width: x1 - x0, height: y1 - y0 };
}

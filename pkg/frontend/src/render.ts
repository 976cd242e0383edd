/**
 * Bone-rig rendering: the server sends world-space joint positions, so
 * drawing is a camera follow, a perspective projection and line/circle
 * strokes on a 2-D canvas. The projection math lives in plain functions
 * so it can be exercised headlessly.
 */
import { Frame, Hello } from "./protocol";

export type Vec3 = [number, number, number];

export interface Camera {
  pos: Vec3;
  target: Vec3;
  /** vertical field of view, radians */
  fovY: number;
}

export function defaultCamera(): Camera {
  return { pos: [0, 1.6, -3.2], target: [0, 0.9, 0], fovY: Math.PI / 3 };
}

const FOLLOW_OFFSET: Vec3 = [0, 0.7, -3.2];
const FOLLOW_RATE = 0.12; // fraction of the gap closed per frame

/** Ease the camera after the root, keeping a fixed shoulder offset. */
export function followCamera(cam: Camera, root: Vec3): void {
  const want: Vec3 = [
    root[0] + FOLLOW_OFFSET[0],
    root[1] + FOLLOW_OFFSET[1],
    root[2] + FOLLOW_OFFSET[2],
  ];
  for (let i = 0; i < 3; i += 1) {
    cam.pos[i] += (want[i] - cam.pos[i]) * FOLLOW_RATE;
    cam.target[i] += (root[i] - cam.target[i]) * FOLLOW_RATE;
  }
}

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function norm(a: Vec3): Vec3 {
  const n = Math.hypot(a[0], a[1], a[2]) || 1;
  return [a[0] / n, a[1] / n, a[2] / n];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export interface Projected {
  x: number;
  y: number;
  /** camera-space depth; points at or behind the eye report <= 0 */
  depth: number;
}

/** Perspective projection of a world point to pixel coordinates. */
export function projectPoint(
  p: Vec3,
  cam: Camera,
  width: number,
  height: number,
): Projected {
  const forward = norm(sub(cam.target, cam.pos));
  const right = norm(cross([0, 1, 0], forward));
  const up = cross(forward, right);
  const rel = sub(p, cam.pos);
  const xc = dot(rel, right);
  const yc = dot(rel, up);
  const zc = dot(rel, forward);
  const f = height / 2 / Math.tan(cam.fovY / 2);
  if (zc <= 1e-6) return { x: NaN, y: NaN, depth: zc };
  return {
    x: width / 2 + (f * xc) / zc,
    y: height / 2 - (f * yc) / zc,
    depth: zc,
  };
}

/** Parent->child index pairs for every non-root joint. */
export function boneSegments(hello: Hello): [number, number][] {
  const out: [number, number][] = [];
  hello.skeleton.joints.forEach((j, i) => {
    if (j.parent >= 0) out.push([j.parent, i]);
  });
  return out;
}

/** Project every joint of a frame; one entry per joint. */
export function projectFrame(
  frame: Frame,
  cam: Camera,
  width: number,
  height: number,
): Projected[] {
  return frame.joints.pos.map((p) =>
    projectPoint(p as Vec3, cam, width, height),
  );
}

export function drawRig(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  frame: Frame,
  bones: [number, number][],
  cam: Camera,
): void {
  followCamera(cam, frame.root.pos as Vec3);
  const pts = projectFrame(frame, cam, width, height);
  ctx.clearRect(0, 0, width, height);

  // ground reference under the root
  const root = frame.root.pos as Vec3;
  ctx.strokeStyle = "#2a2f36";
  ctx.beginPath();
  for (let g = -4; g <= 4; g += 1) {
    const a = projectPoint([root[0] + g, 0, root[2] - 4], cam, width, height);
    const b = projectPoint([root[0] + g, 0, root[2] + 4], cam, width, height);
    const c = projectPoint([root[0] - 4, 0, root[2] + g], cam, width, height);
    const d = projectPoint([root[0] + 4, 0, root[2] + g], cam, width, height);
    if (a.depth > 0 && b.depth > 0) {
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
    }
    if (c.depth > 0 && d.depth > 0) {
      ctx.moveTo(c.x, c.y);
      ctx.lineTo(d.x, d.y);
    }
  }
  ctx.stroke();

  ctx.strokeStyle = "#8fd0ff";
  ctx.lineWidth = 2;
  ctx.beginPath();
  for (const [p, c] of bones) {
    const a = pts[p];
    const b = pts[c];
    if (!a || !b || a.depth <= 0 || b.depth <= 0) continue;
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
  }
  ctx.stroke();

  ctx.fillStyle = "#e8f4ff";
  for (const pt of pts) {
    if (pt.depth <= 0) continue;
    const r = Math.max(1.5, 9 / pt.depth);
    ctx.beginPath();
    ctx.arc(pt.x, pt.y, r, 0, Math.PI * 2);
    ctx.fill();
  }
  ctx.lineWidth = 1;
}

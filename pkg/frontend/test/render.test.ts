import { describe, expect, it } from "vitest";

import {
  Camera,
  boneSegments,
  defaultCamera,
  followCamera,
  projectFrame,
  projectPoint,
} from "../src/render";
import { Hello } from "../src/protocol";
import { makeFrame, makeHello } from "./helpers";

function centeredCam(): Camera {
  return { pos: [0, 1, -4], target: [0, 1, 0], fovY: Math.PI / 3 };
}

describe("projection", () => {
  it("the look-at point lands in the screen center", () => {
    const p = projectPoint([0, 1, 0], centeredCam(), 800, 600);
    expect(p.x).toBeCloseTo(400, 6);
    expect(p.y).toBeCloseTo(300, 6);
    expect(p.depth).toBeCloseTo(4, 6);
  });

  it("mirrored points project to mirrored screen positions", () => {
    // a T-pose reads symmetric on screen
    const cam = centeredCam();
    const left = projectPoint([-0.5, 1.2, 0], cam, 800, 600);
    const right = projectPoint([0.5, 1.2, 0], cam, 800, 600);
    expect(left.y).toBeCloseTo(right.y, 8);
    expect(400 - left.x).toBeCloseTo(right.x - 400, 6);
  });

  it("nearer points spread further from center", () => {
    const cam = centeredCam();
    const near = projectPoint([0.5, 1, -1], cam, 800, 600);
    const far = projectPoint([0.5, 1, 2], cam, 800, 600);
    expect(near.x - 400).toBeGreaterThan(far.x - 400);
  });

  it("points behind the eye report non-positive depth", () => {
    const p = projectPoint([0, 1, -9], centeredCam(), 800, 600);
    expect(p.depth).toBeLessThanOrEqual(0);
    expect(Number.isNaN(p.x)).toBe(true);
  });

  it("higher world points draw higher on screen", () => {
    const cam = centeredCam();
    const lo = projectPoint([0, 0.5, 0], cam, 800, 600);
    const hi = projectPoint([0, 1.5, 0], cam, 800, 600);
    expect(hi.y).toBeLessThan(lo.y);
  });
});

describe("bone segments", () => {
  it("pairs every non-root joint with its parent", () => {
    expect(boneSegments(makeHello(4))).toEqual([
      [0, 1],
      [1, 2],
      [2, 3],
    ]);
  });

  it("supports branching skeletons", () => {
    const hello = makeHello(3) as Hello;
    hello.skeleton.joints[2]!.parent = 0;
    expect(boneSegments(hello)).toEqual([
      [0, 1],
      [0, 2],
    ]);
  });
});

describe("camera follow", () => {
  it("converges onto a stationary root", () => {
    const cam = defaultCamera();
    for (let i = 0; i < 400; i += 1) followCamera(cam, [10, 0.9, 5]);
    expect(cam.target[0]).toBeCloseTo(10, 3);
    expect(cam.target[2]).toBeCloseTo(5, 3);
    expect(cam.pos[0]).toBeCloseTo(10, 3);
    expect(cam.pos[2]).toBeCloseTo(5 - 3.2, 3);
  });

  it("keeps every joint of a frame projectable while following", () => {
    const cam = defaultCamera();
    const frame = makeFrame(0);
    for (let i = 0; i < 60; i += 1) {
      followCamera(cam, frame.root.pos as [number, number, number]);
    }
    const pts = projectFrame(frame, cam, 800, 600);
    for (const p of pts) {
      expect(p.depth).toBeGreaterThan(0);
      expect(Number.isFinite(p.x)).toBe(true);
    }
  });
});

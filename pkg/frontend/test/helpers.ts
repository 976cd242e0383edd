/** Builders for well-formed server messages used across the suites. */
import { Frame, Hello } from "../src/protocol";

export function makeHello(nJoints = 4, styles = ["neutral", "march"]): Hello {
  const joints = [];
  for (let i = 0; i < nJoints; i += 1) {
    joints.push({
      name: `j${i}`,
      parent: i - 1,
      offset: [0, i === 0 ? 0 : 0.3, 0] as number[],
    });
  }
  return {
    type: "hello",
    fps: 60,
    styles: styles as [string, ...string[]],
    skeleton: { joints: joints as Hello["skeleton"]["joints"] },
  };
}

export function makeFrame(
  t: number,
  nJoints = 4,
  overrides: Partial<Frame> = {},
): Frame {
  const pos = [];
  const quat = [];
  for (let i = 0; i < nJoints; i += 1) {
    pos.push([0.1 * i, 0.3 * i, 0]);
    quat.push([0, 0, 0, 1]);
  }
  return {
    type: "frame",
    t,
    root: { pos: [0, 0.9, 0], quat: [0, 0, 0, 1] },
    joints: { pos, quat },
    experts: [
      [0.25, 0.25, 0.25, 0.25],
      [0.1, 0.2, 0.3, 0.4],
    ],
    lambda: 0,
    overrun_count: 0,
    ...overrides,
  };
}

export function encodeServer(msg: Hello | Frame): string {
  return JSON.stringify(msg);
}

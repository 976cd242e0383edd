/**
 * UI events to protocol messages. Steering is camera relative: pressing
 * forward walks where the camera looks. Control messages are emitted at
 * most once per render frame and only when the input state changed, so
 * an idle viewer sends nothing.
 */
import { Camera } from "./render";
import { ClientMessage, Gait, encodeClient } from "./protocol";

const KEY_TO_AXIS: Record<string, [number, number]> = {
  KeyW: [0, 1],
  ArrowUp: [0, 1],
  KeyS: [0, -1],
  ArrowDown: [0, -1],
  KeyA: [-1, 0],
  ArrowLeft: [-1, 0],
  KeyD: [1, 0],
  ArrowRight: [1, 0],
};

export class ControlPanel {
  private pressed = new Set<string>();
  private dirty = false;
  speed = 0.95;
  gait: Gait = "walk";
  durationS = 1.0;

  keyDown(code: string): void {
    if (!(code in KEY_TO_AXIS) || this.pressed.has(code)) return;
    this.pressed.add(code);
    this.dirty = true;
  }

  keyUp(code: string): void {
    if (!this.pressed.delete(code)) return;
    this.dirty = true;
  }

  setSpeed(value: number): void {
    this.speed = value;
    this.dirty = true;
  }

  setGait(gait: Gait): void {
    this.gait = gait;
    this.dirty = true;
  }

  /** Summed key axes in camera space: [sideways, forward]. */
  private axes(): [number, number] {
    let side = 0;
    let fwd = 0;
    for (const code of this.pressed) {
      const axis = KEY_TO_AXIS[code];
      if (!axis) continue;
      side += axis[0];
      fwd += axis[1];
    }
    const n = Math.hypot(side, fwd);
    return n > 0 ? [side / n, fwd / n] : [0, 0];
  }

  /** World-space [x, z] steering direction for the current camera. */
  direction(cam: Camera): [number, number] {
    const [side, fwd] = this.axes();
    if (side === 0 && fwd === 0) return [0, 0];
    const fx = cam.target[0] - cam.pos[0];
    const fz = cam.target[2] - cam.pos[2];
    const n = Math.hypot(fx, fz) || 1;
    const f: [number, number] = [fx / n, fz / n];
    const r: [number, number] = [f[1], -f[0]]; // up x forward
    return [f[0] * fwd + r[0] * side, f[1] * fwd + r[1] * side];
  }

  /**
   * The control message for this render frame, or null when nothing
   * changed since the last one. Call once per frame.
   */
  flush(cam: Camera): ClientMessage | null {
    if (!this.dirty) return null;
    this.dirty = false;
    const [x, z] = this.direction(cam);
    const moving = x !== 0 || z !== 0;
    return {
      type: "control",
      dir: [x, z],
      speed: this.speed,
      gait: moving ? this.gait : "stand",
    };
  }

  /** One-hot style switch for the button at `index`. */
  styleMessage(index: number, styleCount: number): ClientMessage {
    if (index < 0 || index >= styleCount) {
      throw new RangeError(`style index ${index} out of 0..${styleCount - 1}`);
    }
    const weights = new Array<number>(styleCount).fill(0);
    weights[index] = 1;
    return { type: "set_style", weights, duration_s: this.durationS };
  }

  /** Two-style blend: weight x on b, 1-x on a. x=0.5 is the even blend. */
  blendMessage(
    a: number,
    b: number,
    x: number,
    styleCount: number,
  ): ClientMessage {
    if (a === b) throw new RangeError("pick two different styles to blend");
    for (const i of [a, b]) {
      if (i < 0 || i >= styleCount) {
        throw new RangeError(`style index ${i} out of 0..${styleCount - 1}`);
      }
    }
    if (!(x >= 0 && x <= 1)) {
      throw new RangeError(`blend position must be in [0, 1], got ${x}`);
    }
    const weights = new Array<number>(styleCount).fill(0);
    weights[a] = 1 - x;
    weights[b] = x;
    return { type: "set_style", weights, duration_s: this.durationS };
  }

  /** Serialize for the socket; throws if the message violates the schema. */
  encode(msg: ClientMessage): string {
    return encodeClient(msg);
  }
}

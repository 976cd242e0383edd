/**
 * Connection-side state: the handshake, the newest frame, and the error
 * banner. Rendering reads `latest` whenever it gets around to it, so a
 * burst of frames collapses to the newest one and none are re-ordered.
 */
import { Frame, Hello, parseServer } from "./protocol";
import { ChartRecorder } from "./charts";

export class ViewerSession {
  hello: Hello | null = null;
  latest: Frame | null = null;
  banner: string | null = null;
  framesSeen = 0;
  readonly charts: ChartRecorder;

  constructor(chartCapacity = 600) {
    this.charts = new ChartRecorder(chartCapacity);
  }

  get styles(): readonly string[] {
    return this.hello ? this.hello.styles : [];
  }

  get jointCount(): number {
    return this.hello ? this.hello.skeleton.joints.length : 0;
  }

  /**
   * Apply one raw websocket message. A message that fails validation or
   * disagrees with the handshake raises the banner and leaves the last
   * good frame in place.
   */
  handleMessage(text: string): void {
    const result = parseServer(text);
    if (!result.ok) {
      this.banner = `protocol error: ${result.error}`;
      return;
    }
    const msg = result.msg;
    if (msg.type === "hello") {
      this.hello = msg;
      this.latest = null;
      this.banner = null;
      this.framesSeen = 0;
      this.charts.clear();
      return;
    }
    if (msg.type === "error") {
      this.banner = `server error [${msg.code}]: ${msg.message}`;
      return;
    }
    if (!this.hello) {
      this.banner = "protocol error: frame before hello";
      return;
    }
    const n = this.hello.skeleton.joints.length;
    if (msg.joints.pos.length !== n || msg.joints.quat.length !== n) {
      this.banner =
        `protocol error: frame carries ${msg.joints.pos.length} joints, ` +
        `handshake skeleton has ${n}`;
      return;
    }
    this.latest = msg;
    this.framesSeen += 1;
    this.charts.record(msg);
  }

  dismissBanner(): void {
    this.banner = null;
  }
}

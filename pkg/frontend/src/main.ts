/** Browser wiring: socket, canvases, panel. State lives in ViewerSession
 * and ControlPanel; this file only moves events between them and the DOM. */
import { ChartSample, drawChart } from "./charts";
import { ControlPanel } from "./controls";
import { Camera, boneSegments, defaultCamera, drawRig } from "./render";
import { ViewerSession } from "./session";

const COLORS = ["#6fb3ff", "#ffb36f", "#8fe08f", "#e08fe0", "#e0e08f",
  "#8fe0e0", "#ff8f8f", "#b3b3ff"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function serverUrl(): string {
  const q = new URLSearchParams(window.location.search).get("server");
  if (q) return q;
  const proto = window.location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${window.location.host}/session`;
}

function main(): void {
  const session = new ViewerSession();
  const panel = new ControlPanel();
  const cam: Camera = defaultCamera();

  const rig = el<HTMLCanvasElement>("rig");
  const rigCtx = rig.getContext("2d")!;
  const expertCanvas = el<HTMLCanvasElement>("experts");
  const expertCtx = expertCanvas.getContext("2d")!;
  const lambdaCanvas = el<HTMLCanvasElement>("lambda");
  const lambdaCtx = lambdaCanvas.getContext("2d")!;
  const banner = el<HTMLDivElement>("banner");
  const styleRow = el<HTMLDivElement>("styles");
  const blendA = el<HTMLSelectElement>("blend-a");
  const blendB = el<HTMLSelectElement>("blend-b");
  const slider = el<HTMLInputElement>("blend-x");
  const layerSel = el<HTMLSelectElement>("layer");
  const status = el<HTMLSpanElement>("status");
  const reconnect = el<HTMLButtonElement>("reconnect");

  let socket: WebSocket | null = null;
  let bones: [number, number][] = [];
  let connected = false;

  function send(text: string): void {
    if (socket && socket.readyState === WebSocket.OPEN) socket.send(text);
  }

  function buildStyleUi(): void {
    styleRow.textContent = "";
    blendA.textContent = "";
    blendB.textContent = "";
    session.styles.forEach((name, i) => {
      const btn = document.createElement("button");
      btn.textContent = name;
      btn.onclick = () =>
        send(panel.encode(panel.styleMessage(i, session.styles.length)));
      styleRow.appendChild(btn);
      for (const sel of [blendA, blendB]) {
        const opt = document.createElement("option");
        opt.value = String(i);
        opt.textContent = name;
        sel.appendChild(opt);
      }
    });
    if (session.styles.length > 1) blendB.selectedIndex = 1;
    const layers = session.charts.layerCount() || 1;
    layerSel.textContent = "";
    for (let i = 0; i < layers; i += 1) {
      const opt = document.createElement("option");
      opt.value = String(i);
      opt.textContent = `gating layer ${i + 1}`;
      layerSel.appendChild(opt);
    }
  }

  function connect(): void {
    socket = new WebSocket(serverUrl());
    socket.onopen = () => {
      connected = true;
      status.textContent = `connected to ${serverUrl()}`;
      reconnect.hidden = true;
      setControlsEnabled(true);
    };
    socket.onmessage = (ev) => {
      const hadHello = session.hello !== null;
      session.handleMessage(String(ev.data));
      if (!hadHello && session.hello) buildStyleUi();
    };
    socket.onclose = () => {
      connected = false;
      status.textContent = "disconnected";
      reconnect.hidden = false;
      setControlsEnabled(false);
    };
    socket.onerror = () => socket?.close();
  }

  function setControlsEnabled(on: boolean): void {
    document
      .querySelectorAll<HTMLButtonElement | HTMLInputElement>(
        "#panel button, #panel input, #panel select",
      )
      .forEach((n) => {
        if (n.id !== "reconnect" && n.id !== "export") n.disabled = !on;
      });
  }

  window.addEventListener("keydown", (ev) => {
    panel.keyDown(ev.code);
  });
  window.addEventListener("keyup", (ev) => {
    panel.keyUp(ev.code);
  });

  el<HTMLInputElement>("speed").oninput = (ev) =>
    panel.setSpeed(Number((ev.target as HTMLInputElement).value));
  el<HTMLSelectElement>("gait").onchange = (ev) =>
    panel.setGait((ev.target as HTMLSelectElement).value as never);
  el<HTMLInputElement>("duration").onchange = (ev) => {
    panel.durationS = Number((ev.target as HTMLInputElement).value) || 1.0;
  };
  slider.onchange = () => {
    const a = Number(blendA.value);
    const b = Number(blendB.value);
    if (a === b) return;
    send(
      panel.encode(
        panel.blendMessage(a, b, Number(slider.value), session.styles.length),
      ),
    );
  };
  layerSel.onchange = () => {
    session.charts.layer = Number(layerSel.value);
  };
  el<HTMLButtonElement>("pause").onclick = (ev) => {
    session.charts.paused = !session.charts.paused;
    (ev.target as HTMLButtonElement).textContent = session.charts.paused
      ? "resume charts"
      : "pause charts";
  };
  el<HTMLButtonElement>("export").onclick = () => {
    const blob = new Blob([session.charts.exportCsv()], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "telemetry.csv";
    a.click();
    URL.revokeObjectURL(a.href);
  };
  el<HTMLButtonElement>("reset").onclick = () =>
    send(panel.encode({ type: "reset", seed: 0 }));
  reconnect.onclick = () => connect();
  el<HTMLButtonElement>("dismiss").onclick = () => session.dismissBanner();

  function frame(): void {
    if (connected) {
      const msg = panel.flush(cam);
      if (msg) send(panel.encode(msg));
    }
    if (session.latest && session.hello) {
      if (bones.length !== session.hello.skeleton.joints.length - 1) {
        bones = boneSegments(session.hello);
      }
      drawRig(rigCtx, rig.width, rig.height, session.latest, bones, cam);
    }
    const samples = session.charts.visible();
    drawExperts(samples);
    drawLambda(samples);
    banner.hidden = session.banner === null;
    el<HTMLSpanElement>("banner-text").textContent = session.banner ?? "";
    requestAnimationFrame(frame);
  }

  function drawExperts(samples: ChartSample[]): void {
    const layer = session.charts.layer;
    const width = samples.reduce(
      (m, s) => Math.max(m, (s.experts[layer] ?? []).length),
      0,
    );
    const series = [];
    for (let e = 0; e < width; e += 1) {
      series.push({
        label: `expert ${e + 1}`,
        color: COLORS[e % COLORS.length]!,
        values: samples.map((s) => s.experts[layer]?.[e] ?? 0),
      });
    }
    drawChart(expertCtx, expertCanvas.width, expertCanvas.height, series, 0, 1);
  }

  function drawLambda(samples: ChartSample[]): void {
    drawChart(
      lambdaCtx,
      lambdaCanvas.width,
      lambdaCanvas.height,
      [
        {
          label: "style ramp",
          color: "#ffd36f",
          values: samples.map((s) => s.lambda),
        },
      ],
      0,
      1,
    );
  }

  setControlsEnabled(false);
  connect();
  requestAnimationFrame(frame);
}

main();

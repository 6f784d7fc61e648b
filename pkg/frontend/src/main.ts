// Page wiring: volume picker, slice canvas with drawing, parameter panel,
// review controls, timer and export buttons.

import { ApiClient, SliceRaster } from "./api.js";
import { MAX_DELTA, SessionController } from "./controller.js";
import {
  applyViewTransform,
  drawCutContour,
  drawNodeOverlay,
  drawSeed,
  drawSliceRaster,
  drawTemplateDraft,
} from "./render.js";

const api = new ApiClient("");
const controller = new SessionController(api);

const canvas = document.getElementById("slice") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const volumeSelect = document.getElementById("volume") as HTMLSelectElement;
const sliceInput = document.getElementById("slice-index") as HTMLInputElement;
const windowLo = document.getElementById("window-lo") as HTMLInputElement;
const windowHi = document.getElementById("window-hi") as HTMLInputElement;
const deltaInput = document.getElementById("param-delta") as HTMLInputElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const timerLabel = document.getElementById("timer") as HTMLSpanElement;
const nodeToggle = document.getElementById("overlay-nodes") as HTMLInputElement;

deltaInput.max = String(MAX_DELTA);

let raster: SliceRaster | null = null;

function showBanner(text: string, kind: "info" | "error" = "info"): void {
  banner.textContent = text;
  banner.className = kind;
}

function repaint(): void {
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!raster) return;
  applyViewTransform(ctx, controller.view);
  drawSliceRaster(ctx, raster);
  if (controller.view.drawMode !== "review") {
    drawTemplateDraft(ctx, controller.draw.vertices, controller.draw.closed);
    if (controller.seed) drawSeed(ctx, controller.seed);
  } else if (controller.current && controller.view.overlays.contour) {
    drawCutContour(ctx, controller.current.cut);
    if (controller.view.overlays.nodes && controller.seed) {
      drawNodeOverlay(ctx, controller.seed, controller.current.cut, controller.params.n);
    }
  }
}

async function loadSlice(): Promise<void> {
  if (!controller.view.volumeId) return;
  const lo = parseFloat(windowLo.value);
  const hi = parseFloat(windowHi.value);
  const window: [number, number] | undefined =
    Number.isFinite(lo) && Number.isFinite(hi) && hi > lo ? [lo, hi] : undefined;
  raster = await api.getSlice(controller.view.volumeId, controller.view.slice, window);
  canvas.width = raster.width;
  canvas.height = raster.height;
  repaint();
}

function canvasPoint(event: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const x = ((event.clientX - rect.left) / rect.width) * canvas.width;
  const y = ((event.clientY - rect.top) / rect.height) * canvas.height;
  const v = controller.view;
  return [(x - v.panX) / v.zoom, (y - v.panY) / v.zoom];
}

canvas.addEventListener("click", (event) => {
  const [x, y] = canvasPoint(event);
  if (controller.view.drawMode === "template") {
    controller.draw.addVertex(x, y);
  } else if (controller.view.drawMode === "seed") {
    controller.placeSeed(x, y);
  }
  repaint();
});

canvas.addEventListener("dblclick", () => {
  if (controller.view.drawMode !== "template") return;
  if (controller.draw.close()) {
    controller.view.drawMode = "seed";
    showBanner("template closed; click inside it to place the seed point");
  } else {
    showBanner(controller.draw.message ?? "cannot close template", "error");
  }
  repaint();
});

document.addEventListener("keydown", (event) => {
  if (event.key === "Enter" && controller.view.drawMode === "template") {
    if (controller.draw.close()) {
      controller.view.drawMode = "seed";
      showBanner("template closed; place the seed point");
    } else {
      showBanner(controller.draw.message ?? "cannot close template", "error");
    }
    repaint();
  }
});

function readParams(): void {
  controller.setParams({
    k: parseInt((document.getElementById("param-k") as HTMLInputElement).value, 10),
    n: parseInt((document.getElementById("param-n") as HTMLInputElement).value, 10),
    delta: parseInt(deltaInput.value, 10),
    t_weight: parseFloat((document.getElementById("param-tw") as HTMLInputElement).value),
    sf: parseFloat((document.getElementById("param-sf") as HTMLInputElement).value),
  });
  deltaInput.value = String(controller.params.delta); // show the clamp
}

async function guard(action: () => Promise<void>): Promise<void> {
  try {
    await action();
  } catch (err) {
    showBanner(err instanceof Error ? err.message : String(err), "error");
  }
}

document.getElementById("start")!.addEventListener("click", () =>
  guard(async () => {
    readParams();
    await controller.submitTemplate(controller.view.slice);
    showBanner(`session ${controller.sessionId} started`);
    repaint();
  }),
);

for (const [id, direction] of [
  ["accept-up", 1],
  ["accept-down", -1],
] as const) {
  document.getElementById(id)!.addEventListener("click", () =>
    guard(async () => {
      const skip = parseInt(
        (document.getElementById("skip") as HTMLInputElement).value || "1",
        10,
      );
      await controller.accept(direction, Math.max(1, skip));
      await loadSlice();
      showBanner(`slice ${controller.view.slice}`);
    }),
  );
}

document.getElementById("redraw")!.addEventListener("click", () => {
  controller.draw.reset();
  controller.view.drawMode = "template";
  showBanner("redraw: outline the structure on this slice again");
  repaint();
});

document.getElementById("finalize")!.addEventListener("click", () =>
  guard(async () => {
    const result = await controller.finalize();
    showBanner(
      `finalized ${result.slices} slices (${result.interpolated.length} interpolated)`,
    );
  }),
);

function download(name: string, bytes: Uint8Array, type: string): void {
  const blob = new Blob([bytes as BlobPart], { type });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

document.getElementById("export-mask")!.addEventListener("click", () =>
  guard(async () => {
    download("mask.nrrd", await controller.exportMask(), "application/octet-stream");
  }),
);

document.getElementById("export-contours")!.addEventListener("click", () =>
  guard(async () => {
    download("contours.json", await controller.exportContours(), "application/json");
  }),
);

sliceInput.addEventListener("change", () =>
  guard(async () => {
    controller.view.slice = parseInt(sliceInput.value, 10) || 0;
    await loadSlice();
  }),
);

for (const input of [windowLo, windowHi]) {
  input.addEventListener("change", () => guard(loadSlice));
}

nodeToggle.addEventListener("change", () => {
  controller.view.overlays.nodes = nodeToggle.checked;
  repaint();
});

setInterval(() => {
  timerLabel.textContent = `${controller.elapsedSeconds().toFixed(0)} s`;
}, 500);

guard(async () => {
  const volumes = await api.listVolumes();
  for (const v of volumes) {
    const option = document.createElement("option");
    option.value = v.id;
    option.textContent = `${v.id} (${v.sizes.join("x")})`;
    volumeSelect.appendChild(option);
  }
  if (volumes.length > 0) {
    controller.selectVolume(volumes[0].id);
    await loadSlice();
  }
});

volumeSelect.addEventListener("change", () =>
  guard(async () => {
    controller.selectVolume(volumeSelect.value);
    controller.view.slice = 0;
    sliceInput.value = "0";
    await loadSlice();
  }),
);

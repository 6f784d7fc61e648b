// Scripted end-to-end session against the real service: the exported mask
// must be byte-identical to a headless CLI replay of the logged events.

import assert from "node:assert/strict";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 8700 + (process.pid % 800);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let dataDir = "";
let workDir = "";

function cli(args: string[]): void {
  const result = spawnSync(PYTHON, ["-m", "radialcut.cli", ...args], {
    encoding: "utf-8",
  });
  assert.equal(result.status, 0, `cli ${args[0]} failed: ${result.stderr}`);
}

async function waitForServer(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/volumes`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service did not come up in time");
}

before(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "radialcut-data-"));
  workDir = mkdtempSync(join(tmpdir(), "radialcut-work-"));
  cli([
    "phantom",
    "--out-volume",
    join(dataDir, "phantom.nrrd"),
    "--out-truth",
    join(dataDir, "truth.nrrd"),
  ]);
  server = spawn(
    PYTHON,
    ["-m", "radialcut.cli", "serve", "--port", String(PORT), "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  await waitForServer();
});

after(() => {
  server?.kill("SIGTERM");
});

test("scripted session: drawn template, 5 accepts, finalize, export == CLI replay", async () => {
  const api = new ApiClient(BASE);
  const controller = new SessionController(api);

  const volumes = await api.listVolumes();
  assert.deepEqual(
    volumes.map((v) => v.id),
    ["phantom", "truth"],
  );
  controller.selectVolume("phantom");

  // the default phantom tube starts centered at (64, 64) with radius 10;
  // outline it at radius 20 with 24 clicks, then place the seed
  for (let i = 0; i < 24; i++) {
    const angle = (2 * Math.PI * i) / 24;
    controller.draw.addVertex(64 + 20 * Math.cos(angle), 64 + 20 * Math.sin(angle));
  }
  assert.equal(controller.draw.close(), true);
  controller.placeSeed(64, 64);
  controller.setParams({ delta: 7 }); // panel clamp: lands on 2
  assert.equal(controller.params.delta, 2);

  await controller.submitTemplate(0);
  assert.equal(controller.status, "reviewing");

  for (let step = 0; step < 5; step++) {
    const rec = await controller.accept(1, 1);
    // the rendered contour is the parsed payload, byte-equal to the body
    assert.equal(controller.displayedContour(), rec.cut.contour);
    assert.equal(
      JSON.stringify(rec.cut.contour),
      JSON.stringify(JSON.parse(rec.raw).cut.contour),
    );
  }
  assert.equal(controller.view.slice, 5);

  const summary = await controller.finalize();
  assert.equal(summary.status, "finalized");
  assert.equal(summary.slices, 6);
  assert.ok(controller.elapsedSeconds() > 0);

  const uiMask = await controller.exportMask();
  const uiContours = await controller.exportContours();

  // replay the server-side event log headlessly and compare bytes
  const state = await api.getSession(controller.sessionId!);
  assert.ok(state.events.every((e) => typeof e.time === "number"));
  // the drawn polygon reached the server verbatim, no client-side transform
  assert.deepEqual(state.events[0].template, controller.draw.vertices);
  assert.deepEqual(state.events[0].seed, [64, 64]);
  const replayPath = join(workDir, "replay.json");
  writeFileSync(
    replayPath,
    JSON.stringify({ object: state.object, events: state.events }),
  );
  const maskPath = join(workDir, "mask.nrrd");
  const contoursPath = join(workDir, "contours.json");
  cli([
    "segment",
    "--volume",
    join(dataDir, "phantom.nrrd"),
    "--replay",
    replayPath,
    "--out-mask",
    maskPath,
    "--out-contours",
    contoursPath,
  ]);

  const cliMask = readFileSync(maskPath);
  const cliContours = readFileSync(contoursPath);
  assert.ok(cliMask.equals(Buffer.from(uiMask)), "mask bytes differ");
  assert.ok(cliContours.equals(Buffer.from(uiContours)), "contour bytes differ");
});

test("server rejects an out-of-bound delta outright", async () => {
  const api = new ApiClient(BASE);
  await assert.rejects(
    api.createSession({
      volume: "phantom",
      z0: 0,
      template: [
        [44, 64],
        [64, 44],
        [84, 64],
        [64, 84],
      ],
      seed: [64, 64],
      params: { delta: 3 },
    }),
    /delta/,
  );
});

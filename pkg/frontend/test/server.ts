/**
 * Test harness: boots the real Python verification service on a free port
 * and crafts candidate sets for it.  Tests talk to it over actual HTTP,
 * so the client is exercised against the service it ships with.
 */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { get } from "node:http";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface LiveServer {
  base: string;
  dataRoot: string;
  stop(): Promise<void>;
}

/** Raw node:http probe; works the same under node and browser-like test envs. */
function ping(url: string): Promise<boolean> {
  return new Promise((resolve) => {
    const req = get(url, (res) => {
      res.resume();
      resolve(res.statusCode === 200);
    });
    req.on("error", () => resolve(false));
  });
}

export async function startServer(): Promise<LiveServer> {
  const dataRoot = mkdtempSync(join(tmpdir(), "verify-ui-"));
  const port = 8300 + (process.pid % 997) + Math.floor(Math.random() * 18000);
  const code = [
    "import uvicorn",
    "from pointvos.server import create_app",
    `uvicorn.run(create_app(${JSON.stringify(dataRoot)}), host="127.0.0.1", port=${port}, log_level="warning")`,
  ].join("; ");
  const child: ChildProcess = spawn("python3", ["-c", code], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  const base = `http://127.0.0.1:${port}`;

  const deadline = Date.now() + 30_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service exited with ${child.exitCode} before becoming ready`);
    }
    if (await ping(`${base}/config`)) {
      break;
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error("service did not become ready in 30s");
    }
    await new Promise((r) => setTimeout(r, 150));
  }

  return {
    base,
    dataRoot,
    stop: () =>
      new Promise<void>((resolve) => {
        child.once("exit", () => resolve());
        child.kill();
      }),
  };
}

/**
 * A 40-item candidate set: 2 frames x (7 foreground + 10 background +
 * 3 uncertain).  The service queues them foreground first, then
 * background, then uncertain, frame-ascending within each type.
 */
export function fortyItemCandidates(objectId = "obj"): unknown {
  const candidates: Array<{ frame: number; x: number; y: number; proposed_label: string }> = [];
  for (const frame of [0, 1]) {
    for (let i = 0; i < 7; i++) {
      candidates.push({ frame, x: 10 + i, y: 5, proposed_label: "foreground" });
    }
    for (let i = 0; i < 10; i++) {
      candidates.push({ frame, x: 10 + i, y: 15, proposed_label: "background" });
    }
    for (let i = 0; i < 3; i++) {
      candidates.push({ frame, x: 10 + i, y: 25, proposed_label: "uncertain" });
    }
  }
  return {
    schema: "pv-candidates/1",
    video_id: "vid",
    object_id: objectId,
    rng_algorithm: "xoshiro256**/splitmix64",
    config: {},
    frames: [0, 1],
    candidates,
  };
}

/**
 * The queue order the service builds from fortyItemCandidates(): type
 * (foreground, background, uncertain) then frame.  Used to predict what
 * an export must contain for a scripted verdict sequence.
 */
export function fortyItemQueue(): Array<{ frame: number; x: number; y: number; proposed_label: string }> {
  const byType: Record<string, Array<{ frame: number; x: number; y: number; proposed_label: string }>> = {
    foreground: [],
    background: [],
    uncertain: [],
  };
  for (const frame of [0, 1]) {
    for (let i = 0; i < 7; i++) {
      byType["foreground"]!.push({ frame, x: 10 + i, y: 5, proposed_label: "foreground" });
    }
    for (let i = 0; i < 10; i++) {
      byType["background"]!.push({ frame, x: 10 + i, y: 15, proposed_label: "background" });
    }
    for (let i = 0; i < 3; i++) {
      byType["uncertain"]!.push({ frame, x: 10 + i, y: 25, proposed_label: "uncertain" });
    }
  }
  return [...byType["foreground"]!, ...byType["background"]!, ...byType["uncertain"]!];
}

/**
 * Mirror of the service's export mapping, to compute the export a verdict
 * sequence must produce: accepted foreground/uncertain -> positive,
 * accepted background -> negative, rejected uncertain -> negative,
 * ambiguous -> ambiguous, other rejections dropped.
 */
export function expectedExport(
  decisions: string[],
): Array<{ frame: number; x: number; y: number; label: string; source: string }> {
  const queue = fortyItemQueue();
  const out: Array<{ frame: number; x: number; y: number; label: string; source: string }> = [];
  queue.forEach((item, index) => {
    const decision = decisions[index]!;
    let label: string | null = null;
    if (decision === "ambiguous") {
      label = "ambiguous";
    } else if (decision === "accept") {
      label = item.proposed_label === "background" ? "negative" : "positive";
    } else if (item.proposed_label === "uncertain") {
      label = "negative";
    }
    if (label !== null) {
      out.push({ frame: item.frame, x: item.x, y: item.y, label, source: "verified" });
    }
  });
  return out;
}

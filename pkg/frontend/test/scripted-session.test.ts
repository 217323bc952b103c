/**
 * End-to-end acceptance: drive the frontend session logic through all 30
 * fixture tasks against a real review server, with predetermined verdicts,
 * and require the report endpoint to equal an independently kept hand
 * tally. The all-correct pass must reproduce the 30 / 160 / 160 / 160 row.
 *
 * The servers are real `spanmt review serve` processes; the fixture comes
 * from scripts/make_review_fixture.py (30 tasks, 160 source entities).
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { existsSync, mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, ReviewApiClient } from "../src/api";
import { reportCells, REPORT_COLUMNS } from "../src/report";
import { QuestionCursor, ReviewSession } from "../src/session";
import type { ReportRow } from "../src/types";

const REPO_ROOT = resolve(fileURLToPath(new URL(".", import.meta.url)), "../..");
const DIST_INDEX = join(REPO_ROOT, "frontend", "dist", "index.html");
const LONG = 120_000;

interface Server {
  base: string;
  proc: ChildProcess;
  output: string[];
}

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("could not allocate a port"));
        return;
      }
      probe.close(() => resolvePort(address.port));
    });
  });
}

async function startServer(tasksFile: string, logFile: string, staticDir?: string): Promise<Server> {
  const port = await freePort();
  const args = ["review", "serve", "--tasks", tasksFile, "--log", logFile,
    "--bind", `127.0.0.1:${port}`];
  if (staticDir !== undefined) args.push("--static", staticDir);
  const proc = spawn("spanmt", args, { cwd: REPO_ROOT });
  const output: string[] = [];
  proc.stdout?.on("data", (chunk) => output.push(String(chunk)));
  proc.stderr?.on("data", (chunk) => output.push(String(chunk)));
  const base = `http://127.0.0.1:${port}`;

  for (let attempt = 0; attempt < 300; attempt++) {
    if (proc.exitCode !== null) {
      throw new Error(`review server exited early:\n${output.join("")}`);
    }
    try {
      const health = await fetch(`${base}/api/health`);
      if (health.ok) {
        const body = await health.json();
        if (body.status === "ok") return { base, proc, output };
      }
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  proc.kill();
  throw new Error(`review server did not come up:\n${output.join("")}`);
}

/** Independent tally of the verdicts as they are entered, one per language. */
class HandTally {
  sentences_reviewed = 0;
  sentences_meaning_ok = 0;
  entities_total = 0;
  entities_transferred_ok = 0;
  entities_translation_ok = 0;
  entities_boundary_ok = 0;

  sentence(meaning: boolean): void {
    this.sentences_reviewed += 1;
    if (meaning) this.sentences_meaning_ok += 1;
  }

  entity(transferred: boolean, translation: boolean, boundary: boolean): void {
    this.entities_total += 1;
    if (transferred) this.entities_transferred_ok += 1;
    if (translation) this.entities_translation_ok += 1;
    if (boundary) this.entities_boundary_ok += 1;
  }

  row(language: string): ReportRow {
    return {
      language,
      sentences_reviewed: this.sentences_reviewed,
      sentences_meaning_ok: this.sentences_meaning_ok,
      entities_total: this.entities_total,
      entities_transferred_ok: this.entities_transferred_ok,
      entities_translation_ok: this.entities_translation_ok,
      entities_boundary_ok: this.entities_boundary_ok,
    };
  }
}

let fixtureDir: string;
let saturated: Server;
let mixed: Server;

beforeAll(async () => {
  fixtureDir = mkdtempSync(join(tmpdir(), "review-fixture-"));
  execFileSync("python3", [join(REPO_ROOT, "scripts", "make_review_fixture.py"),
    "--out", fixtureDir], { cwd: REPO_ROOT });
  const tasksFile = join(fixtureDir, "tasks.json");
  const staticDir = existsSync(DIST_INDEX) ? join(REPO_ROOT, "frontend", "dist") : undefined;
  [saturated, mixed] = await Promise.all([
    startServer(tasksFile, join(fixtureDir, "log-saturated.jsonl"), staticDir),
    startServer(tasksFile, join(fixtureDir, "log-mixed.jsonl")),
  ]);
}, LONG);

afterAll(() => {
  saturated?.proc.kill();
  mixed?.proc.kill();
  if (fixtureDir) rmSync(fixtureDir, { recursive: true, force: true });
});

describe("scripted review session against a live server", () => {
  it("all-correct pass over 30 tasks reproduces the saturation row", async () => {
    const client = new ReviewApiClient(saturated.base);
    const session = new ReviewSession(client, "de", "scripted-yes");
    await session.load();
    expect(session.taskCount).toBe(30);
    expect(session.currentTask()?.sentence_id).toBe("fixture-0");

    const tally = new HandTally();
    while (session.currentTask() !== null) {
      const form = session.form();
      if (form === null) throw new Error("form missing for pending task");
      const cursor = new QuestionCursor(form);
      while (cursor.current() !== null) cursor.answer(true);
      tally.sentence(true);
      for (const _ of form.task.source.entities) tally.entity(true, true, true);
      const ack = await session.submit();
      expect(ack.status).toBe("accepted");
    }
    expect(session.judgedCount).toBe(30);

    // The fixture shape makes the all-correct tally a recognizable row.
    expect(tally.row("de")).toEqual({
      language: "de",
      sentences_reviewed: 30,
      sentences_meaning_ok: 30,
      entities_total: 160,
      entities_transferred_ok: 160,
      entities_translation_ok: 160,
      entities_boundary_ok: 160,
    });

    const reported = await client.getReport("de");
    expect(reported).toEqual(tally.row("de"));
  }, LONG);

  it("report view renders the wire payload byte for byte", async () => {
    const raw = await (await fetch(`${saturated.base}/api/report?lang=de`)).text();
    const cells = reportCells(JSON.parse(raw) as ReportRow);
    for (const [i, { key }] of REPORT_COLUMNS.entries()) {
      const expected = key === "language" ? `"${key}":"${cells[i]}"` : `"${key}":${cells[i]}`;
      expect(raw).toContain(expected);
    }
  }, LONG);

  it("mixed predetermined verdicts aggregate identically on both sides", async () => {
    const client = new ReviewApiClient(mixed.base);
    const session = new ReviewSession(client, "de", "scripted-mixed");
    await session.load();

    const tally = new HandTally();
    let index = 0;
    while (session.currentTask() !== null) {
      const form = session.form();
      if (form === null) throw new Error("form missing for pending task");
      const meaning = index % 7 !== 0;
      form.setMeaning(meaning);
      tally.sentence(meaning);
      for (const entity of form.task.source.entities) {
        const transferred = (index + entity.id) % 11 !== 0;
        form.setVerdict(entity.id, "transferred", transferred);
        let translation = false;
        let boundary = false;
        if (transferred) {
          translation = (index + entity.id) % 5 !== 0;
          boundary = (index + entity.id) % 3 !== 0;
          form.setVerdict(entity.id, "translation_correct", translation);
          form.setVerdict(entity.id, "boundary_correct", boundary);
        }
        tally.entity(transferred, translation, boundary);
      }
      expect(form.isComplete()).toBe(true);
      await session.submit();
      index += 1;
    }
    expect(index).toBe(30);

    const expected = tally.row("de");
    expect(expected.entities_total).toBe(160);
    expect(expected.entities_transferred_ok).toBeGreaterThan(0);
    expect(expected.entities_transferred_ok).toBeLessThan(160);
    expect(await client.getReport("de")).toEqual(expected);
  }, LONG);

  it("rejected submissions surface the detail and never reach the report", async () => {
    const client = new ReviewApiClient(saturated.base);
    const before = await client.getReport("de");

    const err = await client
      .submitJudgment({
        task_id: "de:fixture-0",
        reviewer_id: "scripted-bad",
        meaning_preserved: true,
        entities: {},
      })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.detail).toContain("cover exactly");

    const missing = await client.getTask("de:no-such-task").catch((e) => e);
    expect(missing).toBeInstanceOf(ApiError);
    expect(missing.status).toBe(404);

    expect(await client.getReport("de")).toEqual(before);
  }, LONG);

  it("serves the built assets (or the placeholder) at the root", async () => {
    const response = await fetch(`${saturated.base}/`);
    expect(response.status).toBe(200);
    const html = await response.text();
    if (existsSync(DIST_INDEX)) {
      expect(html).toContain('id="app"');
      expect(html).toContain("app.js");
    } else {
      expect(html).toContain("JSON API is live");
    }
  }, LONG);
});

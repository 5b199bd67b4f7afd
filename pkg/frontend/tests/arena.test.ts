/** Scripted browser test: mount the arena in a DOM, spawn the real game
 * server, and play full sessions through the UI layer by clicking the
 * rendered choice buttons and typing terms into open slots.
 */
import { spawn, type ChildProcess } from "node:child_process";
import { dirname, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Arena } from "../src/app.js";
import { ArenaApi } from "../src/api.js";

const PORT = 8765 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

const DISTRIBUTION =
  "forall x. (a(x) & b(x)) -> (forall x. a(x)) & (forall x. b(x))";

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 150; attempt++) {
    try {
      const response = await fetch(`${BASE}/v1/sessions/nope`);
      if (response.status === 404) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("game server did not come up");
}

beforeAll(async () => {
  server = spawn(
    "/usr/bin/python3",
    ["-m", "uvicorn", "--factory", "dialogic.server:create_app",
     "--port", String(PORT), "--log-level", "warning"],
    {
      cwd: REPO_ROOT,
      env: { ...process.env, PYTHONPATH: `${REPO_ROOT}/src` },
      stdio: ["ignore", "inherit", "inherit"],
    },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

function freshArena(): Arena {
  document.body.innerHTML = '<div id="arena"></div>';
  const root = document.getElementById("arena") as HTMLElement;
  return new Arena(root, new ArenaApi(BASE));
}

function choiceButtons(): HTMLButtonElement[] {
  return Array.from(document.querySelectorAll(".choice-button"));
}

function bannerStatus(): string {
  const banner = document.querySelector(".banner") as HTMLElement;
  return banner.dataset.status ?? "";
}

/** Click through one full game: pick the conjunct branch by index when the
 * server offers several options, and type the given term into open slots. */
async function playThrough(
  arena: Arena,
  branchPick: number,
  term: string,
): Promise<string> {
  await arena.start(DISTRIBUTION);
  await arena.whenIdle();
  for (let round = 0; round < 20; round++) {
    if (bannerStatus().startsWith("finished")) {
      break;
    }
    const buttons = choiceButtons();
    expect(buttons.length).toBeGreaterThan(0);
    const index = Math.min(branchPick, buttons.length - 1);
    const button = buttons[index];
    const input = button.parentElement?.querySelector(
      ".term-input",
    ) as HTMLInputElement | null;
    if (input) {
      input.value = term;
    }
    button.click();
    await arena.whenIdle();
  }
  return bannerStatus();
}

describe("arena against the distribution formula", () => {
  it("wins all twenty scripted human lines, exotic terms included", async () => {
    const terms = [
      "c", "d", "v0", "v7", "f(c)", "g(c,d)", "f(f(c))", "f(g(c,c))",
      "peculiar_term", "z'",
    ];
    const outcomes: string[] = [];
    for (const branchPick of [0, 1]) {
      for (const term of terms) {
        const arena = freshArena();
        const status = await playThrough(arena, branchPick, term);
        outcomes.push(`${branchPick}/${term}: ${status}`);
      }
    }
    expect(outcomes).toHaveLength(20);
    for (const line of outcomes) {
      expect(line).toMatch(/finished_p_win$/);
    }
  });

  it("transcript shows enabler arrows pointing at the server indices", async () => {
    const arena = freshArena();
    await playThrough(arena, 0, "c");
    const rows = Array.from(document.querySelectorAll(".move"));
    expect(rows.length).toBeGreaterThan(4);
    for (const row of rows.slice(1)) {
      const enabler = (row as HTMLElement).dataset.enabler;
      expect(row.textContent).toContain(`↩ m${enabler}`);
    }
  });

  it("banner advertises best-effort when no strategy exists", async () => {
    const arena = freshArena();
    await arena.start("a -> b");
    await arena.whenIdle();
    const banner = document.querySelector(".banner") as HTMLElement;
    expect(banner.textContent).toContain("best-effort");
  });
});

describe("start form error handling", () => {
  it("shows an inline error for invalid syntax and creates no session", async () => {
    const arena = freshArena();
    const input = document.querySelector(".formula-input") as HTMLInputElement;
    input.value = "a & (";
    (document.querySelector(".start-form") as HTMLFormElement).dispatchEvent(
      new Event("submit"),
    );
    await arena.whenIdle();
    const error = document.querySelector(".error") as HTMLElement;
    expect(error.textContent).not.toBe("");
    expect(arena.sessionId).toBeNull();
    expect(document.querySelectorAll(".move")).toHaveLength(0);
  });

  it("requires a term before submitting an open-slot move", async () => {
    const arena = freshArena();
    await arena.start(DISTRIBUTION);
    await arena.whenIdle();
    // advance to the universal-attack turn: attack the implication, pick a conjunct
    for (let i = 0; i < 2; i++) {
      choiceButtons()[0].click();
      await arena.whenIdle();
    }
    const button = choiceButtons()[0];
    const input = button.parentElement?.querySelector(".term-input");
    expect(input).not.toBeNull();
    const before = document.querySelectorAll(".move").length;
    button.click();
    await arena.whenIdle();
    expect(document.querySelectorAll(".move")).toHaveLength(before);
    const error = document.querySelector(".error") as HTMLElement;
    expect(error.textContent).toContain("term");
  });
});

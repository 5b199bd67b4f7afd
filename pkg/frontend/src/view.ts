/** DOM rendering: the move transcript with enabler arrows, the choice panel,
 * and the status banner.  Games are linear, so the transcript is a vertical
 * list indented by enabler depth; only strategies branch, and the browser
 * plays a single game at a time.
 */

import type { GameJson, MoveContent, MoveJson, MoveOption } from "./api.js";

export function describeContent(content: MoveContent): string {
  if (typeof content === "string") {
    return content;
  }
  switch (content.kind) {
    case "and1":
      return "?and-left";
    case "and2":
      return "?and-right";
    case "or":
      return "?or";
    case "exists":
      return "?exists";
    case "forall":
      return `?forall[${content.term ?? "?"}]`;
    case "formula":
      return `?${content.formula ?? ""}`;
  }
}

function enablerDepths(moves: MoveJson[]): number[] {
  const depths: number[] = [];
  moves.forEach((move, index) => {
    depths.push(move.enabler === null ? 0 : depths[move.enabler] + 1);
  });
  return depths;
}

export function renderTranscript(container: HTMLElement, game: GameJson): void {
  container.textContent = "";
  const depths = enablerDepths(game.moves);
  game.moves.forEach((move, index) => {
    const row = container.ownerDocument.createElement("div");
    row.className = `move ${index % 2 === 0 ? "proponent" : "opponent"}`;
    row.style.marginLeft = `${depths[index]}em`;
    const who = index % 2 === 0 ? "P" : "O";
    const arrow = move.enabler === null ? "" : ` ↩ m${move.enabler}`;
    row.textContent = `m${index} ${who}${move.polarity} ${describeContent(move.content)}${arrow}`;
    row.dataset.index = String(index);
    row.dataset.enabler = move.enabler === null ? "" : String(move.enabler);
    container.appendChild(row);
  });
}

export type ChooseHandler = (option: MoveOption, term?: string) => void;

export function renderChoices(
  container: HTMLElement,
  options: MoveOption[],
  onChoose: ChooseHandler,
): void {
  container.textContent = "";
  const doc = container.ownerDocument;
  options.forEach((option, index) => {
    const row = doc.createElement("div");
    row.className = "choice";
    let termInput: HTMLInputElement | null = null;
    if (option.open_term) {
      termInput = doc.createElement("input");
      termInput.className = "term-input";
      termInput.placeholder = "term";
    }
    const button = doc.createElement("button");
    button.className = "choice-button";
    button.dataset.index = String(index);
    button.textContent = option.description;
    button.addEventListener("click", () => {
      if (termInput !== null && termInput.value.trim() === "") {
        row.classList.add("invalid");
        setInlineError(container, "a term is required for this move");
        return;
      }
      onChoose(option, termInput?.value.trim());
    });
    row.appendChild(button);
    if (termInput !== null) {
      row.appendChild(termInput);
    }
    container.appendChild(row);
  });
}

export function setInlineError(near: HTMLElement, message: string): void {
  const root = near.ownerDocument.querySelector(".error");
  if (root) {
    root.textContent = message;
  }
}

export function renderBanner(
  container: HTMLElement,
  status: string,
  strategyFound: boolean,
): void {
  let text = "";
  if (status === "finished_p_win") {
    text = "Proponent wins";
  } else if (status === "finished_o_win") {
    text = "Opponent wins";
  } else if (!strategyFound) {
    text = "no winning strategy found — machine plays best-effort";
  } else {
    text = "your move (you are the Opponent)";
  }
  container.textContent = text;
  container.dataset.status = status;
}

/** The arena: start form, transcript, choice panel, and status banner.
 *
 * All legality lives on the server; the app only displays what the server
 * says and posts back server-listed moves (plus user terms).  A revision
 * counter guards against stale responses from superseded requests.
 */

import { ApiError, ArenaApi, withTerm } from "./api.js";
import type { MoveOption, SessionView } from "./api.js";
import {
  renderBanner, renderChoices, renderTranscript, setInlineError,
} from "./view.js";

export class Arena {
  private api: ArenaApi;
  private root: HTMLElement;
  private revision = 0;
  private pending: Promise<void> = Promise.resolve();
  sessionId: string | null = null;
  lastSession: SessionView | null = null;

  constructor(root: HTMLElement, api: ArenaApi) {
    this.root = root;
    this.api = api;
    this.mount();
  }

  private mount(): void {
    const doc = this.root.ownerDocument;
    this.root.innerHTML = `
      <form class="start-form">
        <input class="formula-input" placeholder="formula, e.g. exists x. (a(x) -> forall y. a(y))" />
        <button class="start-button" type="submit">assert it</button>
      </form>
      <div class="error"></div>
      <div class="banner"></div>
      <div class="transcript"></div>
      <div class="choices"></div>
    `;
    const form = this.root.querySelector(".start-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.root.querySelector(".formula-input") as HTMLInputElement;
      this.start(input.value);
    });
  }

  /** Serialized queue so tests (and double clicks) cannot interleave. */
  private enqueue(work: () => Promise<void>): Promise<void> {
    this.pending = this.pending.then(work, work);
    return this.pending;
  }

  whenIdle(): Promise<void> {
    return this.pending;
  }

  start(formula: string): Promise<void> {
    return this.enqueue(async () => {
      const revision = ++this.revision;
      setInlineError(this.root, "");
      try {
        const session = await this.api.createSession(formula);
        if (revision !== this.revision) {
          return;
        }
        this.sessionId = session.id;
        await this.refresh(session);
      } catch (error) {
        if (error instanceof ApiError && error.reason === "parse-error") {
          this.sessionId = null;
          setInlineError(this.root, error.message);
          return;
        }
        throw error;
      }
    });
  }

  choose(option: MoveOption, term?: string): Promise<void> {
    return this.enqueue(async () => {
      if (this.sessionId === null) {
        return;
      }
      const revision = ++this.revision;
      setInlineError(this.root, "");
      const move = option.open_term && term ? withTerm(option.move, term) : option.move;
      try {
        const session = await this.api.playMove(this.sessionId, move);
        if (revision !== this.revision) {
          return;
        }
        await this.refresh(session);
      } catch (error) {
        if (error instanceof ApiError) {
          setInlineError(this.root, `${error.message} (${error.reason})`);
          return;
        }
        throw error;
      }
    });
  }

  private async refresh(session: SessionView): Promise<void> {
    this.lastSession = session;
    renderTranscript(
      this.root.querySelector(".transcript") as HTMLElement, session.game);
    renderBanner(
      this.root.querySelector(".banner") as HTMLElement,
      session.status, session.machine_strategy_found);
    const choices = this.root.querySelector(".choices") as HTMLElement;
    if (session.status === "awaiting_human") {
      const options = await this.api.listMoves(session.id);
      renderChoices(choices, options, (option, term) => {
        void this.choose(option, term);
      });
    } else {
      choices.textContent = "";
    }
  }
}

export function mountArena(root: HTMLElement, baseUrl: string): Arena {
  return new Arena(root, new ArenaApi(baseUrl));
}

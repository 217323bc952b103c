/**
 * Browser entry point. Wires the session state machine to the DOM: the
 * side-by-side panes, the judgment form with keyboard-first entry, and the
 * report table. All decisions live in session.ts / highlight.ts /
 * report.ts; this file only renders and forwards events.
 */

import { ApiError, ReviewApiClient } from "./api";
import { colorForId, segmentText } from "./highlight";
import { REPORT_COLUMNS, reportCells } from "./report";
import { QuestionCursor, ReviewSession, TaskForm } from "./session";
import type { Question } from "./session";
import type { ReviewTask, VerdictKey } from "./types";

const QUESTION_LABELS: Record<VerdictKey, string> = {
  transferred: "transferred?",
  translation_correct: "translation ok?",
  boundary_correct: "boundary ok?",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderPane(
  title: string,
  text: string,
  entities: ReviewTask["source"]["entities"],
  missingIds: number[],
): HTMLElement {
  const pane = el("div", "pane");
  pane.appendChild(el("h3", undefined, title));
  const body = el("p", "sentence");
  for (const run of segmentText(text, entities, missingIds)) {
    if (run.entityId === null) {
      body.appendChild(document.createTextNode(run.text));
      continue;
    }
    const span = el("span", run.missing ? "entity missing" : "entity", run.text);
    if (run.color !== null && !run.missing) span.style.backgroundColor = run.color;
    span.title = `#${run.entityId} ${run.entityType}` + (run.missing ? " (not transferred)" : "");
    body.appendChild(span);
  }
  pane.appendChild(body);
  return pane;
}

function isCurrent(q: Question | null, entityId: number, key: VerdictKey): boolean {
  return q !== null && q.kind === "verdict" && q.entityId === entityId && q.key === key;
}

function yesNo(
  value: boolean | null,
  enabled: boolean,
  onAnswer: (v: boolean) => void,
): HTMLElement {
  const wrap = el("span", "yesno");
  for (const v of [true, false]) {
    const button = el("button", value === v ? "choice selected" : "choice", v ? "yes" : "no");
    button.disabled = !enabled;
    button.addEventListener("click", () => onAnswer(v));
    wrap.appendChild(button);
  }
  return wrap;
}

class App {
  private readonly client: ReviewApiClient;
  private session!: ReviewSession;
  private readonly root: HTMLElement;
  private showReport = false;

  constructor(root: HTMLElement) {
    this.root = root;
    this.client = new ReviewApiClient("");
  }

  async start(): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    const reviewer = params.get("reviewer") ?? "anonymous";
    let lang = params.get("lang");
    if (lang === null) {
      const all = await this.client.listTasks();
      const langs = [...new Set(all.map((t) => t.language))].sort();
      lang = langs[0] ?? "de";
    }
    this.session = new ReviewSession(this.client, lang, reviewer);
    await this.session.load();
    document.addEventListener("keydown", (event) => this.onKey(event));
    this.render();
  }

  private onKey(event: KeyboardEvent): void {
    if (event.target instanceof HTMLInputElement) return;
    const form = this.session.form();
    if (form === null) return;
    const cursor = new QuestionCursor(form);
    if (event.key === "y" || event.key === "n") {
      if (cursor.answer(event.key === "y")) this.render();
    } else if (event.key === "Enter" && form.isComplete()) {
      void this.submit();
    }
  }

  private async submit(): Promise<void> {
    try {
      await this.session.submit();
    } catch {
      // lastError carries the detail; the form state is preserved.
    }
    this.render();
  }

  private async renderReportInto(host: HTMLElement): Promise<void> {
    const row = await this.client.getReport(this.session.lang);
    const table = el("table", "report");
    const head = el("tr");
    for (const column of REPORT_COLUMNS) head.appendChild(el("th", undefined, column.label));
    table.appendChild(head);
    const body = el("tr");
    for (const cell of reportCells(row)) body.appendChild(el("td", undefined, cell));
    table.appendChild(body);
    host.replaceChildren(table);
  }

  private renderForm(form: TaskForm): HTMLElement {
    const cursor = new QuestionCursor(form);
    const q = cursor.current();
    const box = el("div", "judgment");

    const meaningRow = el("div", q?.kind === "meaning" ? "question current" : "question");
    meaningRow.appendChild(el("span", "label", "overall meaning preserved?"));
    meaningRow.appendChild(
      yesNo(form.meaningPreserved, true, (v) => {
        form.setMeaning(v);
        this.render();
      }),
    );
    box.appendChild(meaningRow);

    for (const entity of form.task.source.entities) {
      const verdict = form.verdict(entity.id);
      const row = el("div", "entity-row");
      const label = el("span", "label entity");
      label.textContent = Array.from(form.task.source.text).slice(entity.start, entity.end).join("");
      if (form.task.missing_ids.includes(entity.id)) {
        label.classList.add("missing");
      } else {
        label.style.backgroundColor = colorForId(entity.id);
      }
      row.appendChild(label);
      for (const key of ["transferred", "translation_correct", "boundary_correct"] as const) {
        const cell = el("span", isCurrent(q, entity.id, key) ? "question current" : "question");
        cell.appendChild(el("span", "qname", QUESTION_LABELS[key]));
        cell.appendChild(
          yesNo(verdict[key], form.isApplicable(entity.id, key), (v) => {
            form.setVerdict(entity.id, key, v);
            this.render();
          }),
        );
        row.appendChild(cell);
      }
      box.appendChild(row);
    }

    const submit = el("button", "submit", "submit judgment (enter)");
    submit.disabled = !form.isComplete();
    submit.addEventListener("click", () => void this.submit());
    box.appendChild(submit);
    return box;
  }

  private render(): void {
    this.root.replaceChildren();

    const header = el("div", "header");
    header.appendChild(el("h2", undefined, `review: ${this.session.lang}`));
    header.appendChild(
      el("span", "progress", `${this.session.judgedCount} / ${this.session.taskCount} judged`),
    );
    const toggle = el("button", undefined, this.showReport ? "back to tasks" : "show report");
    toggle.addEventListener("click", () => {
      this.showReport = !this.showReport;
      this.render();
    });
    header.appendChild(toggle);
    this.root.appendChild(header);

    if (this.session.lastError !== null) {
      this.root.appendChild(el("div", "error", this.session.lastError));
    }

    const task = this.session.currentTask();
    if (this.showReport || task === null) {
      const host = el("div", "report-host", "loading report...");
      this.root.appendChild(host);
      void this.renderReportInto(host).catch((err) => {
        host.textContent = err instanceof ApiError ? err.detail : String(err);
      });
      if (task === null) {
        this.root.appendChild(el("p", undefined, "all tasks judged."));
      }
      return;
    }

    const panes = el("div", "panes");
    panes.appendChild(
      renderPane("source", task.source.text, task.source.entities, task.missing_ids),
    );
    panes.appendChild(renderPane("translated", task.translated.text, task.translated.entities, []));
    this.root.appendChild(panes);
    this.root.appendChild(el("p", "hint", "keys: y / n answer the highlighted question, enter submits"));
    const form = this.session.form();
    if (form !== null) this.root.appendChild(this.renderForm(form));
  }
}

const rootElement = document.getElementById("app");
if (rootElement !== null) {
  const app = new App(rootElement);
  void app.start().catch((err) => {
    rootElement.textContent = err instanceof ApiError ? err.detail : String(err);
  });
}

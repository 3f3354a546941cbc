/** Console shell: a participant pane (blinded) and an experimenter pane
 * (full detail plus device status), a response form wizard, the final
 * distinct-count prompt, a JSONL download, and a trace preview chart.
 *
 * All state lives on the server; the console only mirrors it, so a reload
 * resumes wherever the server's cursor points. */

import { ApiClient, ApiRequestError, ResponseBody, StepInfo } from "./api.js";
import { drawTrace } from "./chart.js";
import { buildResponseForm, ResponseForm } from "./forms.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  id?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (id) node.id = id;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ConsoleApp {
  readonly doc: Document;
  sessionId: string | null = null;
  private form: ResponseForm;
  private participantPane!: HTMLElement;
  private experimenterPane!: HTMLElement;
  private statusLine!: HTMLElement;
  private errorBanner!: HTMLElement;
  private distinctBlock!: HTMLElement;
  private downloadBlock!: HTMLElement;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
  ) {
    this.doc = root.ownerDocument;
    this.form = buildResponseForm(this.doc);
    this.render();
  }

  private render(): void {
    const doc = this.doc;
    this.root.textContent = "";

    const setup = el(doc, "section", "setup");
    const pid = el(doc, "input", "participant-id");
    pid.placeholder = "participant id";
    const seed = el(doc, "input", "seed");
    seed.type = "number";
    seed.value = "0";
    const startBtn = el(doc, "button", "start-btn", "start session");
    startBtn.addEventListener("click", () =>
      this.guard(() => this.start(pid.value, Number(seed.value))),
    );
    const resumeInput = el(doc, "input", "resume-id");
    resumeInput.placeholder = "session id to resume";
    const resumeBtn = el(doc, "button", "resume-btn", "resume");
    resumeBtn.addEventListener("click", () =>
      this.guard(() => this.resume(resumeInput.value)),
    );
    setup.append(pid, seed, startBtn, resumeInput, resumeBtn);

    this.errorBanner = el(doc, "div", "error-banner");
    this.errorBanner.hidden = true;

    this.participantPane = el(doc, "section", "participant-pane");
    this.experimenterPane = el(doc, "section", "experimenter-pane");
    this.statusLine = el(doc, "div", "device-status");

    const formBlock = el(doc, "section", "response-block");
    formBlock.appendChild(this.form.element);
    const submitBtn = el(doc, "button", "submit-btn", "submit response");
    submitBtn.addEventListener("click", () => this.guard(() => this.submit()));
    formBlock.appendChild(submitBtn);

    this.distinctBlock = el(doc, "section", "distinct-block");
    const count = el(doc, "input", "distinct-count");
    count.type = "number";
    const distinctBtn = el(doc, "button", "distinct-btn", "record distinct count");
    distinctBtn.addEventListener("click", () =>
      this.guard(() => this.submitDistinct(Number(count.value))),
    );
    this.distinctBlock.append(
      el(doc, "span", undefined, "how many distinct sensations?"),
      count,
      distinctBtn,
    );
    this.distinctBlock.hidden = true;

    this.downloadBlock = el(doc, "section", "download-block");
    this.downloadBlock.hidden = true;

    const preview = el(doc, "section", "trace-preview");
    const v = el(doc, "input", "trace-v");
    v.value = "300";
    const f = el(doc, "input", "trace-f");
    f.value = "200";
    const previewBtn = el(doc, "button", "trace-btn", "preview trace");
    previewBtn.addEventListener("click", () =>
      this.guard(() => this.preview(Number(v.value), Number(f.value))),
    );
    const canvas = el(doc, "canvas", "trace-canvas");
    canvas.width = 640;
    canvas.height = 200;
    preview.append(
      v,
      f,
      previewBtn,
      el(doc, "div", "trace-error"),
      el(doc, "div", "trace-metrics"),
      canvas,
    );

    this.root.append(
      setup,
      this.errorBanner,
      this.participantPane,
      this.experimenterPane,
      this.statusLine,
      formBlock,
      this.distinctBlock,
      this.downloadBlock,
      preview,
    );
  }

  /** Run an action, routing API failures into the banner instead of losing
   * whatever the user has typed. */
  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      this.errorBanner.hidden = true;
      this.errorBanner.textContent = "";
      await action();
    } catch (err) {
      if (err instanceof ApiRequestError) {
        this.errorBanner.textContent = `${err.code}: ${err.message}`;
        this.errorBanner.hidden = false;
      } else {
        throw err;
      }
    }
  }

  async start(participantId: string, seed: number): Promise<void> {
    const info = await this.client.createSession(participantId, seed);
    this.sessionId = info.id;
    await this.refresh();
  }

  async resume(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.sessionId) return;
    const blinded = await this.client.next(this.sessionId, "participant");
    const full = await this.client.next(this.sessionId, "experimenter");
    this.renderParticipant(blinded);
    this.renderExperimenter(full);
    const status = await this.client.deviceCommand("STATUS");
    this.statusLine.textContent = status.response;
    this.distinctBlock.hidden = !(full.done && full.needs_distinct_count);
    if (full.done && !full.needs_distinct_count) await this.renderDownload();
  }

  private renderParticipant(step: StepInfo): void {
    this.participantPane.textContent = step.done
      ? "session complete — thank you"
      : `condition ${step.cursor + 1} of ${step.total}: feel the cloth surface`;
  }

  private renderExperimenter(step: StepInfo): void {
    if (step.done) {
      this.experimenterPane.textContent = step.needs_distinct_count
        ? "all conditions answered — ask the distinct-sensation question"
        : "session complete";
      return;
    }
    const cond = step.condition as {
      label: string;
      baseline: boolean;
      voltage: number | null;
      frequency: number | null;
    };
    this.experimenterPane.textContent = cond.baseline
      ? `step ${step.cursor + 1}/${step.total}: ${cond.label} (drive off)`
      : `step ${step.cursor + 1}/${step.total}: ${cond.label} — ${cond.voltage} V @ ${cond.frequency} Hz`;
    this.experimenterPane.dataset.voltage = String(cond.voltage);
    this.experimenterPane.dataset.frequency = String(cond.frequency);
    this.experimenterPane.dataset.baseline = String(cond.baseline);
  }

  async submit(): Promise<void> {
    if (!this.sessionId) return;
    const reading = this.form.read();
    if (!reading.payload) {
      this.errorBanner.textContent = reading.errors.join("; ");
      this.errorBanner.hidden = false;
      return; // incomplete form: no request leaves the console
    }
    // The response is keyed by the active condition, which only the
    // experimenter view carries.
    const full = await this.client.next(this.sessionId, "experimenter");
    if (full.done || !full.condition) return;
    const cond = full.condition as { voltage: number | null; frequency: number | null };
    const payload: ResponseBody = {
      condition: { voltage: cond.voltage, frequency: cond.frequency },
      ...reading.payload,
    };
    await this.client.submitResponse(this.sessionId, payload);
    this.form.reset();
    await this.refresh();
  }

  async submitDistinct(count: number): Promise<void> {
    if (!this.sessionId) return;
    await this.client.submitDistinctCount(this.sessionId, count);
    await this.refresh();
  }

  private async renderDownload(): Promise<void> {
    if (!this.sessionId) return;
    const jsonl = await this.client.exportJsonl(this.sessionId);
    this.downloadBlock.textContent = "";
    const link = el(this.doc, "a", "download-link", "download session JSONL");
    const URLImpl = (this.doc.defaultView?.URL ?? URL) as typeof URL;
    const BlobImpl = (this.doc.defaultView?.Blob ?? Blob) as typeof Blob;
    try {
      link.href = URLImpl.createObjectURL(
        new BlobImpl([jsonl], { type: "application/jsonl" }),
      );
    } catch {
      link.href = `/api/sessions/${this.sessionId}/export`;
    }
    link.setAttribute("download", `${this.sessionId}.jsonl`);
    this.downloadBlock.appendChild(link);
    this.downloadBlock.hidden = false;
  }

  async preview(v: number, f: number): Promise<void> {
    const errorBox = this.doc.getElementById("trace-error")!;
    const metricsBox = this.doc.getElementById("trace-metrics")!;
    errorBox.textContent = "";
    metricsBox.textContent = "";
    let trace;
    try {
      trace = await this.client.trace(v, f);
    } catch (err) {
      if (err instanceof ApiRequestError) {
        errorBox.textContent = `${err.code}: ${err.message}`;
        return;
      }
      throw err;
    }
    const m = trace.metrics;
    const peakToPeak = Math.max(...trace.friction_n) - Math.min(...trace.friction_n);
    metricsBox.textContent =
      `fundamental ${m.fundamental.toFixed(1)} Hz · ` +
      `friction peak-to-peak ${peakToPeak.toExponential(3)} N`;
    const canvas = this.doc.getElementById("trace-canvas") as HTMLCanvasElement;
    drawTrace(canvas, trace.t_s, [
      { label: "voltage", color: "#888", values: trace.voltage_v },
      { label: "friction", color: "#c33", values: trace.friction_n },
    ]);
  }
}

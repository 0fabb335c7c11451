import { ApiClient, ApiError } from "./api.js";
import { COUNTER_FIELDS, type CrawlStatus, type DatasetRecord } from "./types.js";

const COUNTER_LABELS: Record<string, string> = {
  papers_seen: "Papers seen",
  gate_positives: "Gate positives",
  descriptions_extracted: "Descriptions extracted",
  links_selected: "Links selected",
  records_written: "Records written",
  reclassified_negatives: "Reclassified negatives",
  errors_count: "Errors",
};

export class CrawlPanel {
  private current: CrawlStatus | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;
  private knownRecords = 0;

  private startButton: HTMLButtonElement;
  private stopButton: HTMLButtonElement;
  private stateLabel: HTMLElement;
  private countersGrid: HTMLElement;
  private eventLog: HTMLUListElement;
  private reconnectBanner: HTMLElement;
  private toastArea: HTMLElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private pollIntervalMs = 2000,
  ) {
    this.root.innerHTML = "";
    const heading = document.createElement("h2");
    heading.textContent = "Crawl";

    this.reconnectBanner = document.createElement("div");
    this.reconnectBanner.className = "banner hidden";
    this.toastArea = document.createElement("div");
    this.toastArea.className = "toasts";

    const controls = document.createElement("div");
    controls.className = "controls";
    this.startButton = document.createElement("button");
    this.startButton.textContent = "Start crawl";
    this.startButton.addEventListener("click", () => void this.startCrawl());
    this.stopButton = document.createElement("button");
    this.stopButton.textContent = "Stop crawl";
    this.stopButton.disabled = true;
    this.stopButton.addEventListener("click", () => void this.stopCrawl());
    this.stateLabel = document.createElement("span");
    this.stateLabel.className = "state-label";
    this.stateLabel.textContent = "idle";
    controls.append(this.startButton, this.stopButton, this.stateLabel);

    this.countersGrid = document.createElement("dl");
    this.countersGrid.className = "counters";
    for (const field of COUNTER_FIELDS) {
      const term = document.createElement("dt");
      term.textContent = COUNTER_LABELS[field];
      const value = document.createElement("dd");
      value.dataset.counter = field;
      value.textContent = "0";
      this.countersGrid.append(term, value);
    }

    const logHeading = document.createElement("h3");
    logHeading.textContent = "Recent records";
    this.eventLog = document.createElement("ul");
    this.eventLog.className = "event-log";

    this.root.append(heading, this.reconnectBanner, this.toastArea, controls,
                     this.countersGrid, logHeading, this.eventLog);
  }

  startPolling(): void {
    if (this.timer !== null) return;
    void this.pollOnce();
    this.timer = setInterval(() => void this.pollOnce(), this.pollIntervalMs);
  }

  dispose(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async startCrawl(): Promise<void> {
    try {
      await this.api.startCrawl();
      this.startButton.disabled = true;
      this.stopButton.disabled = false;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.toast("A crawl is already running.");
      } else {
        this.toast("Could not start the crawl.");
      }
    }
    await this.pollOnce();
  }

  async stopCrawl(): Promise<void> {
    try {
      await this.api.stopCrawl();
    } catch {
      this.toast("Could not reach the server to stop.");
    }
    await this.pollOnce();
  }

  async pollOnce(): Promise<void> {
    if (this.inFlight) return; // at most one in-flight status request
    this.inFlight = true;
    try {
      const frame = await this.api.getStatus();
      this.reconnectBanner.className = "banner hidden";
      this.applyFrame(frame);
    } catch {
      this.reconnectBanner.textContent = "Connection lost; retrying...";
      this.reconnectBanner.className = "banner error";
    } finally {
      this.inFlight = false;
    }
  }

  applyFrame(frame: CrawlStatus): void {
    if (!this.acceptFrame(frame)) return;
    this.current = frame;
    this.renderStatus(frame);
    if (frame.records_written > this.knownRecords) {
      this.knownRecords = frame.records_written;
      void this.refreshEventLog();
    }
  }

  /** Stale frames (an older run, or counters moving backwards within
   *  the same run) are discarded so the displayed chain stays monotone. */
  private acceptFrame(frame: CrawlStatus): boolean {
    const current = this.current;
    if (!current) return true;
    if (frame.started_at !== current.started_at) {
      if (current.started_at && frame.started_at
          && frame.started_at < current.started_at) {
        return false;
      }
      return true;
    }
    return COUNTER_FIELDS.every((field) => frame[field] >= current[field]);
  }

  private renderStatus(status: CrawlStatus): void {
    this.stateLabel.textContent = status.state;
    this.startButton.disabled = status.state !== "idle";
    this.stopButton.disabled = status.state !== "running";
    for (const field of COUNTER_FIELDS) {
      const cell = this.countersGrid.querySelector(
        `[data-counter="${field}"]`,
      ) as HTMLElement;
      cell.textContent = String(status[field]);
    }
  }

  private async refreshEventLog(): Promise<void> {
    try {
      const total = (await this.api.getRecords(0, 1)).total;
      const offset = Math.max(0, total - 5);
      const page = await this.api.getRecords(offset, 5);
      this.eventLog.innerHTML = "";
      for (const record of page.records.slice().reverse()) {
        this.eventLog.appendChild(this.renderLogEntry(record));
      }
    } catch {
      // the next poll retries; the log is best-effort
    }
  }

  private renderLogEntry(record: DatasetRecord): HTMLLIElement {
    const item = document.createElement("li");
    const id = document.createElement("code");
    id.textContent = record.paper_id;
    const title = document.createElement("span");
    title.textContent = ` ${record.title} `;
    item.append(id, title);
    if (record.dataset_url) {
      const link = document.createElement("a");
      link.href = record.dataset_url;
      link.textContent = record.dataset_url;
      item.appendChild(link);
    }
    return item;
  }

  private toast(message: string): void {
    const toast = document.createElement("div");
    toast.className = "toast";
    toast.textContent = message;
    this.toastArea.appendChild(toast);
    setTimeout(() => toast.remove(), 4000);
  }
}

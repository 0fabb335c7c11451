import { ApiClient, ApiError } from "./api.js";
import type { CrawlConfig } from "./types.js";
import { validateConfig } from "./validation.js";

interface FieldSpec {
  key: string;
  label: string;
  kind: "text" | "number" | "checkbox" | "select";
  step?: string;
  options?: string[];
}

const FIELDS: FieldSpec[] = [
  { key: "categories", label: "Categories (comma-separated)", kind: "text" },
  { key: "window.start", label: "Window start (ISO, blank = open)", kind: "text" },
  { key: "window.end", label: "Window end (ISO, blank = open)", kind: "text" },
  { key: "gate_threshold", label: "Gate threshold", kind: "number", step: "0.01" },
  { key: "desc_threshold", label: "Description threshold", kind: "number", step: "0.01" },
  { key: "link_mode", label: "Link selection mode", kind: "select",
    options: ["rule_only", "llm_only", "hybrid"] },
  { key: "thresholds.tau_high", label: "tau_high", kind: "number" },
  { key: "thresholds.tau_mid", label: "tau_mid", kind: "number" },
  { key: "thresholds.delta", label: "delta", kind: "number" },
  { key: "thresholds.top_k", label: "top_k", kind: "number" },
  { key: "thresholds.tau_min", label: "tau_min", kind: "number" },
  { key: "worker_count", label: "Worker threads", kind: "number" },
  { key: "max_downloads", label: "Max PDF download concurrency", kind: "number" },
  { key: "verifier_enabled", label: "Use LLM fallback for link verification",
    kind: "checkbox" },
];

export class ConfigPanel {
  readonly form: HTMLFormElement;
  private banner: HTMLElement;
  private submitButton: HTMLButtonElement;
  private inputs = new Map<string, HTMLInputElement | HTMLSelectElement>();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {
    this.root.innerHTML = "";
    const heading = document.createElement("h2");
    heading.textContent = "Configuration";
    this.banner = document.createElement("div");
    this.banner.className = "banner hidden";
    this.form = document.createElement("form");
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });

    for (const field of FIELDS) {
      const row = document.createElement("label");
      row.className = "field-row";
      const caption = document.createElement("span");
      caption.textContent = field.label;
      let input: HTMLInputElement | HTMLSelectElement;
      if (field.kind === "select") {
        input = document.createElement("select");
        for (const option of field.options ?? []) {
          const el = document.createElement("option");
          el.value = option;
          el.textContent = option;
          input.appendChild(el);
        }
      } else {
        input = document.createElement("input");
        input.type = field.kind;
        if (field.step) input.step = field.step;
      }
      input.name = field.key;
      input.addEventListener("input", () => this.refreshValidation());
      input.addEventListener("change", () => this.refreshValidation());
      const error = document.createElement("span");
      error.className = "field-error";
      error.dataset.errorFor = field.key;
      row.append(caption, input, error);
      this.form.appendChild(row);
      this.inputs.set(field.key, input);
    }

    this.submitButton = document.createElement("button");
    this.submitButton.type = "submit";
    this.submitButton.textContent = "Apply configuration";
    this.form.appendChild(this.submitButton);
    this.root.append(heading, this.banner, this.form);
  }

  async load(): Promise<void> {
    const config = await this.api.getConfig();
    this.populate(config);
    this.refreshValidation();
  }

  populate(config: CrawlConfig): void {
    this.setValue("categories", config.categories.join(", "));
    this.setValue("window.start", config.window.start ?? "");
    this.setValue("window.end", config.window.end ?? "");
    this.setValue("gate_threshold", String(config.gate_threshold));
    this.setValue("desc_threshold", String(config.desc_threshold));
    this.setValue("link_mode", config.link_mode);
    this.setValue("thresholds.tau_high", String(config.thresholds.tau_high));
    this.setValue("thresholds.tau_mid", String(config.thresholds.tau_mid));
    this.setValue("thresholds.delta", String(config.thresholds.delta));
    this.setValue("thresholds.top_k", String(config.thresholds.top_k));
    this.setValue("thresholds.tau_min", String(config.thresholds.tau_min));
    this.setValue("worker_count", String(config.worker_count));
    this.setValue("max_downloads", String(config.max_downloads));
    const verifier = this.inputs.get("verifier_enabled") as HTMLInputElement;
    verifier.checked = config.verifier_enabled;
  }

  readForm(): CrawlConfig {
    const text = (key: string) => this.getValue(key).trim();
    const num = (key: string) => Number(this.getValue(key));
    return {
      categories: text("categories")
        .split(",")
        .map((c) => c.trim())
        .filter((c) => c.length > 0),
      window: {
        start: text("window.start") || null,
        end: text("window.end") || null,
      },
      gate_threshold: num("gate_threshold"),
      desc_threshold: num("desc_threshold"),
      link_mode: this.getValue("link_mode"),
      thresholds: {
        tau_high: num("thresholds.tau_high"),
        tau_mid: num("thresholds.tau_mid"),
        delta: num("thresholds.delta"),
        top_k: num("thresholds.top_k"),
        tau_min: num("thresholds.tau_min"),
      },
      worker_count: num("worker_count"),
      max_downloads: num("max_downloads"),
      verifier_enabled: (this.inputs.get("verifier_enabled") as HTMLInputElement)
        .checked,
    };
  }

  refreshValidation(): boolean {
    const errors = validateConfig(this.readForm());
    for (const field of FIELDS) {
      const el = this.form.querySelector(
        `[data-error-for="${field.key}"]`,
      ) as HTMLElement;
      el.textContent = errors[field.key] ?? "";
    }
    const valid = Object.keys(errors).length === 0;
    this.submitButton.disabled = !valid;
    return valid;
  }

  async submit(): Promise<void> {
    if (!this.refreshValidation()) {
      return; // invalid form never reaches the server
    }
    this.hideBanner();
    try {
      const applied = await this.api.putConfig(this.readForm());
      this.populate(applied);
      this.showBanner("Configuration applied.", "ok");
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.showBanner(
          "A crawl is running; configuration is locked until it stops.",
          "conflict",
        );
      } else if (error instanceof ApiError) {
        this.showBanner(`Rejected: ${error.message}`, "error");
      } else {
        this.showBanner("Server unreachable; changes not saved.", "error");
      }
      // form values stay as edited so nothing is lost on conflict
    }
  }

  private setValue(key: string, value: string): void {
    const input = this.inputs.get(key);
    if (input) input.value = value;
  }

  private getValue(key: string): string {
    return this.inputs.get(key)?.value ?? "";
  }

  private showBanner(message: string, kind: string): void {
    this.banner.textContent = message;
    this.banner.className = `banner ${kind}`;
  }

  private hideBanner(): void {
    this.banner.className = "banner hidden";
    this.banner.textContent = "";
  }
}

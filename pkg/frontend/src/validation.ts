import type { CrawlConfig } from "./types.js";

// Client-side mirror of the server's config rules for responsive
// feedback; the server stays authoritative on PUT.

export type FieldErrors = Partial<Record<string, string>>;

const CATEGORY_PATTERN = /^[a-z-]+\.[A-Za-z]{2,4}$/;
const LINK_MODES = ["rule_only", "llm_only", "hybrid"];

export function validateConfig(config: CrawlConfig): FieldErrors {
  const errors: FieldErrors = {};

  if (config.categories.length === 0) {
    errors.categories = "at least one category is required";
  } else if (!config.categories.every((c) => CATEGORY_PATTERN.test(c))) {
    errors.categories = "category codes look like cs.CL";
  }

  if (!(config.gate_threshold >= 0 && config.gate_threshold <= 1)) {
    errors.gate_threshold = "must be between 0 and 1";
  }
  if (!(config.desc_threshold >= 0 && config.desc_threshold <= 1)) {
    errors.desc_threshold = "must be between 0 and 1";
  }
  if (!LINK_MODES.includes(config.link_mode)) {
    errors.link_mode = `one of ${LINK_MODES.join(", ")}`;
  }

  const t = config.thresholds;
  for (const [name, value] of Object.entries(t)) {
    if (!Number.isInteger(value)) {
      errors[`thresholds.${name}`] = "must be an integer";
    }
  }
  if (!(t.tau_high > t.tau_mid && t.tau_mid > t.tau_min && t.tau_min > 0)) {
    errors["thresholds.tau_high"] =
      errors["thresholds.tau_high"] ?? "need tau_high > tau_mid > tau_min > 0";
  }
  if (!(t.delta >= 1)) {
    errors["thresholds.delta"] = "must be at least 1";
  }
  if (!(t.top_k >= 1)) {
    errors["thresholds.top_k"] = "must be at least 1";
  }

  if (!Number.isInteger(config.worker_count) || config.worker_count < 1) {
    errors.worker_count = "must be at least 1";
  }
  if (!Number.isInteger(config.max_downloads) || config.max_downloads < 1) {
    errors.max_downloads = "must be at least 1";
  }

  const { start, end } = config.window;
  if (start && end && start > end) {
    errors["window.start"] = "window start must not exceed end";
  }

  return errors;
}

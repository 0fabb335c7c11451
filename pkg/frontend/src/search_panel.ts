import { ApiClient, ApiError } from "./api.js";
import type { SearchHit } from "./types.js";

export const NO_LINK_BADGE = "no reliable dataset link";

export class SearchPanel {
  private input: HTMLInputElement;
  private kSelect: HTMLSelectElement;
  private results: HTMLElement;
  private errorArea: HTMLElement;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private sequence = 0;
  private lastQuery = "";
  private controller: AbortController | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private debounceMs = 300,
  ) {
    this.root.innerHTML = "";
    const heading = document.createElement("h2");
    heading.textContent = "Search";

    const bar = document.createElement("div");
    bar.className = "search-bar";
    this.input = document.createElement("input");
    this.input.type = "search";
    this.input.placeholder = "Describe the dataset you need...";
    this.input.addEventListener("input", () => this.scheduleSearch());
    this.kSelect = document.createElement("select");
    for (const k of [5, 10, 25, 50]) {
      const option = document.createElement("option");
      option.value = String(k);
      option.textContent = `top ${k}`;
      this.kSelect.appendChild(option);
    }
    this.kSelect.value = "10";
    this.kSelect.addEventListener("change", () => this.scheduleSearch());
    bar.append(this.input, this.kSelect);

    this.errorArea = document.createElement("div");
    this.errorArea.className = "banner hidden";
    this.results = document.createElement("div");
    this.results.className = "results";
    this.renderEmptyState();

    this.root.append(heading, bar, this.errorArea, this.results);
  }

  private scheduleSearch(): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.runSearch();
    }, this.debounceMs);
  }

  async runSearch(): Promise<void> {
    const query = this.input.value.trim();
    this.lastQuery = query;
    if (!query) {
      this.renderEmptyState();
      return;
    }
    const ticket = ++this.sequence; // responses for superseded queries are dropped
    this.controller?.abort(); // at most one in-flight search request
    this.controller = typeof AbortController !== "undefined" ? new AbortController() : null;
    try {
      const response = await this.api.search(
        query,
        Number(this.kSelect.value),
        this.controller?.signal,
      );
      if (ticket !== this.sequence) return;
      this.errorArea.className = "banner hidden";
      this.renderHits(response.hits);
    } catch (error) {
      if (ticket !== this.sequence) return;
      if (error instanceof ApiError && error.status === 503) {
        this.showRetry("Search backend is unavailable.");
      } else {
        this.showRetry("Search failed.");
      }
    }
  }

  private renderEmptyState(): void {
    this.results.innerHTML = "";
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No results yet; enter a query above.";
    this.results.appendChild(empty);
  }

  /** Hits render in payload order; the server's ranking is final. */
  private renderHits(hits: SearchHit[]): void {
    this.results.innerHTML = "";
    if (hits.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "Nothing matched this query.";
      this.results.appendChild(empty);
      return;
    }
    for (const hit of hits) {
      this.results.appendChild(this.renderCard(hit));
    }
  }

  private renderCard(hit: SearchHit): HTMLElement {
    const card = document.createElement("article");
    card.className = "hit-card";
    card.dataset.paperId = hit.paper_id;

    const header = document.createElement("header");
    const rank = document.createElement("span");
    rank.className = "rank";
    rank.textContent = `#${hit.rank}`;
    const similarity = document.createElement("span");
    similarity.className = "similarity";
    similarity.textContent = hit.similarity.toFixed(4);
    const title = document.createElement("a");
    title.className = "paper-link";
    title.href = hit.paper_url;
    title.textContent = hit.title || hit.paper_id;
    header.append(rank, similarity, title);

    const description = document.createElement("p");
    description.className = "description";
    description.textContent = hit.description;

    const footer = document.createElement("footer");
    if (hit.dataset_url) {
      const link = document.createElement("a");
      link.className = "dataset-link";
      link.href = hit.dataset_url;
      link.textContent = hit.dataset_url;
      footer.appendChild(link);
    } else {
      const badge = document.createElement("span");
      badge.className = "badge no-link";
      badge.textContent = NO_LINK_BADGE;
      footer.appendChild(badge);
    }
    const seen = document.createElement("time");
    seen.className = "last-seen";
    seen.dateTime = hit.last_seen;
    seen.textContent = `last seen ${hit.last_seen}`;
    footer.appendChild(seen);

    card.append(header, description, footer);
    return card;
  }

  private showRetry(message: string): void {
    this.errorArea.innerHTML = "";
    this.errorArea.className = "banner error";
    const text = document.createElement("span");
    text.textContent = `${message} `;
    const retry = document.createElement("button");
    retry.className = "retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => {
      this.input.value = this.lastQuery;
      void this.runSearch();
    });
    this.errorArea.append(text, retry);
  }
}

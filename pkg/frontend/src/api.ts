import type {
  CrawlConfig,
  CrawlStatus,
  RecordsResponse,
  SearchResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = {};
    try {
      body = await response.json();
    } catch {
      body = {};
    }
    if (!response.ok) {
      const err = body as { code?: string; message?: string };
      throw new ApiError(
        response.status,
        err.code ?? "error",
        err.message ?? `request failed with status ${response.status}`,
      );
    }
    return body as T;
  }

  getConfig(): Promise<CrawlConfig> {
    return this.request<CrawlConfig>("/config");
  }

  putConfig(config: CrawlConfig): Promise<CrawlConfig> {
    return this.request<CrawlConfig>("/config", {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  startCrawl(): Promise<{ run_id: string; state: string }> {
    return this.request("/crawl/start", { method: "POST" });
  }

  stopCrawl(): Promise<{ acknowledged: boolean; state: string }> {
    return this.request("/crawl/stop", { method: "POST" });
  }

  getStatus(): Promise<CrawlStatus> {
    return this.request<CrawlStatus>("/crawl/status");
  }

  search(query: string, k: number, signal?: AbortSignal): Promise<SearchResponse> {
    return this.request<SearchResponse>(
      `/search?q=${encodeURIComponent(query)}&k=${k}`,
      signal ? { signal } : undefined,
    );
  }

  getRecords(offset = 0, limit = 100): Promise<RecordsResponse> {
    return this.request<RecordsResponse>(`/records?offset=${offset}&limit=${limit}`);
  }
}

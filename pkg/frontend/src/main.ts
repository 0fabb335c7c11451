import { ApiClient } from "./api.js";
import { ConfigPanel } from "./config_panel.js";
import { CrawlPanel } from "./crawl_panel.js";
import { SearchPanel } from "./search_panel.js";

document.addEventListener("DOMContentLoaded", () => {
  const api = new ApiClient("");

  const configRoot = document.getElementById("config-panel");
  const crawlRoot = document.getElementById("crawl-panel");
  const searchRoot = document.getElementById("search-panel");
  if (!configRoot || !crawlRoot || !searchRoot) {
    throw new Error("panel containers missing from index.html");
  }

  const configPanel = new ConfigPanel(configRoot, api);
  void configPanel.load();

  const crawlPanel = new CrawlPanel(crawlRoot, api);
  crawlPanel.startPolling();

  new SearchPanel(searchRoot, api);
});

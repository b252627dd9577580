// Boot the annotator page. Configuration is the API base URL and the
// user's bearer token, from ?api=...&token=... or window.REDLINE_CONFIG.

import { createApp } from "./app.js";
import type { AppConfig } from "./app.js";

declare global {
  interface Window {
    REDLINE_CONFIG?: AppConfig;
  }
}

function readConfig(): AppConfig {
  const params = new URLSearchParams(window.location.search);
  const fromWindow = window.REDLINE_CONFIG;
  const baseUrl = params.get("api") ?? fromWindow?.baseUrl ?? "";
  const token = params.get("token") ?? fromWindow?.token ?? "";
  if (!baseUrl || !token) {
    throw new Error("configure the API base URL and token (?api=...&token=...)");
  }
  return { baseUrl: baseUrl.replace(/\/$/, ""), token };
}

const root = document.getElementById("app");
if (root) {
  try {
    createApp(root, readConfig());
  } catch (err) {
    root.textContent = err instanceof Error ? err.message : String(err);
  }
}

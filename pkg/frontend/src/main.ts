/** Browser entry point. The API base defaults to same-origin, which is the
 * deployment mode where the service itself serves these static assets;
 * window.EPIRISK_API_BASE overrides it for split hosting.
 */

import { createApp } from "./app.js";

declare global {
  interface Window {
    EPIRISK_API_BASE?: string;
  }
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const app = createApp(root, {
    apiBase: window.EPIRISK_API_BASE ?? "",
    storage: window.localStorage,
  });
  void app.start();
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}

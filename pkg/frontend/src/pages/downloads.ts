// Downloads page: one link per exportable table. The links point straight
// at the API's CSV endpoints so the browser stores the service's bytes
// unmodified; downloadCsv() is the programmatic equivalent.

import type { ApiClient } from "../api.js";

export const DOWNLOAD_TABLES = ["processed", "historical"] as const;

export function renderDownloadsPage(api: ApiClient): string {
  const links = DOWNLOAD_TABLES.map(
    (table) =>
      `<li><a class="download-link" data-table="${table}" ` +
      `href="${api.downloadUrl(table)}" download="${table}.csv">${table}.csv</a></li>`,
  );
  return (
    `<section class="page downloads"><h2>Data downloads</h2>` +
    `<p>Each file is the service's CSV export for one lifecycle table.</p>` +
    `<ul class="downloads-list">${links.join("")}</ul></section>`
  );
}

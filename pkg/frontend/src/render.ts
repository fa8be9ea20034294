/**
 * Pure HTML builders. Keeping these free of DOM access makes the result
 * layout testable without a browser; app.ts injects the strings.
 */

import type { DatasetPreview, Job, ModelOutcome } from "./api.js";

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;")
        .replace(/'/g, "&#39;");
}

export function datasetPreviewTable(preview: DatasetPreview): string {
    const header = preview.columns
        .map((column) => `<th>${escapeHtml(column)}</th>`)
        .join("");
    const body = preview.rows
        .map(
            (row) =>
                `<tr>${row
                    .map((cell) => `<td>${escapeHtml(cell === null ? "" : String(cell))}</td>`)
                    .join("")}</tr>`,
        )
        .join("");
    return (
        `<table class="preview"><thead><tr>${header}</tr></thead>` +
        `<tbody>${body}</tbody></table>` +
        `<p class="preview-note">${preview.rows.length} of ${preview.row_count} rows</p>`
    );
}

function executionBadge(outcome: ModelOutcome): string {
    if (!outcome.execution) return "";
    const status = outcome.execution.status;
    return `<span class="badge badge-${escapeHtml(status)}">${escapeHtml(status)}</span>`;
}

/**
 * One card per model: the chart when it rendered, the error when it did
 * not, and the generated script in a collapsed panel either way.
 */
export function resultCard(
    wireName: string,
    outcome: ModelOutcome,
    chartUrl: string,
): string {
    const title = `<h3>${escapeHtml(wireName)} ${executionBadge(outcome)}</h3>`;
    let main: string;
    if (outcome.error) {
        main = `<p class="error">${escapeHtml(outcome.error)}</p>`;
    } else if (outcome.denied) {
        main =
            `<p class="error">blocked by safety screen: ` +
            `${escapeHtml(outcome.denied.category)}</p>`;
    } else if (outcome.execution && outcome.execution.status === "ok") {
        main = `<img class="chart" src="${escapeHtml(chartUrl)}" alt="chart from ${escapeHtml(wireName)}">`;
    } else if (outcome.execution) {
        main =
            `<p class="error">execution ${escapeHtml(outcome.execution.status)}: ` +
            `${escapeHtml(outcome.execution.stderr_tail.slice(-400))}</p>`;
    } else {
        main = `<p class="note">no execution (script only)</p>`;
    }
    const script = outcome.sanitized_script
        ? `<details class="script"><summary>generated script</summary>` +
          `<pre>${escapeHtml(outcome.sanitized_script)}</pre></details>`
        : "";
    return `<div class="card" data-model="${escapeHtml(wireName)}">${title}${main}${script}</div>`;
}

export function resultsView(
    job: Job,
    chartUrlFor: (wireName: string) => string,
): string {
    const cards = Object.entries(job.outcomes)
        .map(([wireName, outcome]) => resultCard(wireName, outcome, chartUrlFor(wireName)))
        .join("\n");
    return (
        `<section class="job" data-job="${escapeHtml(job.job_id)}">` +
        `<h2>&ldquo;${escapeHtml(job.query_text)}&rdquo;</h2>` +
        `<div class="cards">${cards}</div></section>`
    );
}

export function countCards(html: string): number {
    return (html.match(/class="card"/g) ?? []).length;
}

/**
 * Browser entry point: wires the session state, the API client and the
 * renderers to the static index.html skeleton.
 */

import { ApiClient } from "./api.js";
import {
    ALL_MODELS,
    buildSubmission,
    canSubmit,
    newSession,
    recordJob,
    selectDataset,
    setQueryDraft,
    toggleModel,
} from "./session.js";
import { datasetPreviewTable, resultsView } from "./render.js";

const client = new ApiClient("");
const session = newSession();

function element<T extends HTMLElement>(id: string): T {
    const found = document.getElementById(id);
    if (!found) throw new Error(`missing #${id}`);
    return found as T;
}

function refreshControls(): void {
    element<HTMLButtonElement>("submit").disabled = !canSubmit(session);
    element<HTMLInputElement>("access-key").style.display =
        session.providerMode === "live" ? "inline-block" : "none";
}

async function refreshPreview(): Promise<void> {
    if (!session.selectedDatasetId) return;
    const preview = await client.previewDataset(session.selectedDatasetId);
    element("preview").innerHTML = datasetPreviewTable(preview);
}

async function loadDatasets(): Promise<void> {
    const datasets = await client.listDatasets();
    const picker = element<HTMLSelectElement>("dataset");
    picker.innerHTML = datasets
        .map(
            (d) =>
                `<option value="${d.id}">${d.name} (${d.row_count} rows)</option>`,
        )
        .join("");
    picker.onchange = async () => {
        selectDataset(session, picker.value);
        refreshControls();
        await refreshPreview();
    };
    if (datasets.length > 0) {
        selectDataset(session, datasets[0].id);
        picker.value = datasets[0].id;
        await refreshPreview();
    }
    refreshControls();
}

function wireModelCheckboxes(): void {
    const holder = element("models");
    holder.innerHTML = ALL_MODELS.map(
        (name) =>
            `<label><input type="checkbox" data-model="${name}" checked> ${name}</label>`,
    ).join(" ");
    holder.querySelectorAll("input[type=checkbox]").forEach((box) => {
        box.addEventListener("change", () => {
            toggleModel(session, (box as HTMLInputElement).dataset.model ?? "");
            refreshControls();
        });
    });
}

async function submit(): Promise<void> {
    const results = element("results");
    const submitButton = element<HTMLButtonElement>("submit");
    submitButton.disabled = true;
    try {
        const job = await client.submitQuery(buildSubmission(session));
        const finished = await client.pollJob(job.job_id);
        recordJob(session, finished.job_id);
        results.insertAdjacentHTML(
            "afterbegin",
            resultsView(finished, (wireName) =>
                client.chartUrl(finished.job_id, wireName),
            ),
        );
    } catch (error) {
        results.insertAdjacentHTML(
            "afterbegin",
            `<p class="error">${String(error)}</p>`,
        );
    } finally {
        refreshControls();
    }
}

export function start(): void {
    wireModelCheckboxes();
    void loadDatasets();

    const query = element<HTMLTextAreaElement>("query");
    query.addEventListener("input", () => {
        setQueryDraft(session, query.value);
        refreshControls();
    });

    const provider = element<HTMLSelectElement>("provider");
    provider.addEventListener("change", () => {
        session.providerMode = provider.value === "live" ? "live" : "replay";
        refreshControls();
    });

    const accessKey = element<HTMLInputElement>("access-key");
    accessKey.addEventListener("input", () => {
        session.accessKey = accessKey.value;
        refreshControls();
    });

    element<HTMLButtonElement>("submit").addEventListener("click", () => {
        void submit();
    });
    refreshControls();
}

if (typeof document !== "undefined") {
    document.addEventListener("DOMContentLoaded", start);
}

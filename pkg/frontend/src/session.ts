/**
 * Per-tab session state and the submission rules.
 *
 * The access key lives in memory only and is attached exclusively to
 * live-mode submissions; replay submissions never carry it.
 */

import type { SubmitRequest } from "./api.js";

export type ProviderMode = "live" | "replay";

export interface SessionState {
    selectedDatasetId: string | null;
    selectedModels: string[];
    providerMode: ProviderMode;
    queryDraft: string;
    accessKey: string;
    jobHistory: string[];
}

export const ALL_MODELS = [
    "text-davinci-003",
    "code-davinci-002",
    "gpt-3.5-turbo",
];

export function newSession(): SessionState {
    return {
        selectedDatasetId: null,
        selectedModels: [...ALL_MODELS],
        providerMode: "replay",
        queryDraft: "",
        accessKey: "",
        jobHistory: [],
    };
}

export function selectDataset(state: SessionState, datasetId: string): void {
    state.selectedDatasetId = datasetId;
}

export function toggleModel(state: SessionState, wireName: string): void {
    const at = state.selectedModels.indexOf(wireName);
    if (at >= 0) {
        state.selectedModels.splice(at, 1);
    } else {
        state.selectedModels.push(wireName);
    }
}

export function setQueryDraft(state: SessionState, text: string): void {
    state.queryDraft = text;
}

/** Refining is editing the draft and submitting again as a brand-new job. */
export function refineQuery(state: SessionState, editedText: string): void {
    state.queryDraft = editedText;
}

export function canSubmit(state: SessionState): boolean {
    return (
        state.selectedDatasetId !== null &&
        state.selectedModels.length > 0 &&
        state.queryDraft.trim().length > 0 &&
        (state.providerMode === "replay" || state.accessKey.length > 0)
    );
}

export function buildSubmission(state: SessionState): SubmitRequest {
    if (!canSubmit(state)) {
        throw new Error("submission requires a dataset, a model and a query");
    }
    const submission: SubmitRequest = {
        dataset_id: state.selectedDatasetId as string,
        query_text: state.queryDraft,
        models: [...state.selectedModels],
        provider: state.providerMode,
    };
    if (state.providerMode === "live") {
        submission.api_key = state.accessKey;
    }
    return submission;
}

export function recordJob(state: SessionState, jobId: string): void {
    state.jobHistory.push(jobId);
}

/**
 * Thin client of the text2chart HTTP API. The UI never builds prompts or
 * touches scripts itself; everything comes back from the service as job
 * artifacts.
 */

export interface DatasetSummary {
    id: string;
    name: string;
    columns: string[];
    row_count: number;
    origin_kind: string;
}

export interface DatasetPreview {
    columns: string[];
    rows: (string | number | boolean | null)[][];
    row_count: number;
}

export interface ExecutionResult {
    status: "ok" | "script_error" | "timeout" | "denied" | "harness_error";
    png_b64?: string;
    stderr_tail: string;
    duration_ms: number;
}

export interface ModelOutcome {
    model: { kind: string; wire_name: string };
    prompt_full_text: string | null;
    boundary_offset: number | null;
    raw_completion: string | null;
    finish_reason: string | null;
    sanitized_script: string | null;
    removed_load_lines: string[] | null;
    denied: { category: string; matched_text: string } | null;
    execution: ExecutionResult | null;
    error: string | null;
}

export interface Job {
    job_id: string;
    dataset_id: string;
    query_text: string;
    provider: string;
    created_at: string;
    status: string;
    outcomes: Record<string, ModelOutcome>;
}

export interface SubmitRequest {
    dataset_id: string;
    query_text: string;
    models: string[];
    provider: "live" | "replay";
    api_key?: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(readonly status: number, detail: string) {
        super(`HTTP ${status}: ${detail}`);
    }
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const body = await response.json();
                if (body && typeof body.detail === "string") detail = body.detail;
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(response.status, detail);
        }
        return (await response.json()) as T;
    }

    listDatasets(): Promise<DatasetSummary[]> {
        return this.request<DatasetSummary[]>("/datasets");
    }

    previewDataset(datasetId: string, limit = 10): Promise<DatasetPreview> {
        return this.request<DatasetPreview>(
            `/datasets/${encodeURIComponent(datasetId)}/preview?limit=${limit}`,
        );
    }

    async uploadDataset(
        kind: "csv" | "sqlite",
        name: string,
        body: Uint8Array | string,
    ): Promise<string[]> {
        const payload: BodyInit =
            typeof body === "string" ? body : new Blob([body as BlobPart]);
        const result = await this.request<{ dataset_ids: string[] }>(
            `/datasets?kind=${kind}&name=${encodeURIComponent(name)}`,
            { method: "POST", body: payload },
        );
        return result.dataset_ids;
    }

    submitQuery(submission: SubmitRequest): Promise<Job> {
        return this.request<Job>("/jobs", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(submission),
        });
    }

    getJob(jobId: string): Promise<Job> {
        return this.request<Job>(`/jobs/${encodeURIComponent(jobId)}`);
    }

    chartUrl(jobId: string, wireName: string): string {
        return (
            `${this.baseUrl}/jobs/${encodeURIComponent(jobId)}` +
            `/models/${encodeURIComponent(wireName)}/chart.png`
        );
    }

    /** Poll until the job reports complete (1s cadence by default). */
    async pollJob(
        jobId: string,
        intervalMs = 1000,
        timeoutMs = 60000,
    ): Promise<Job> {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const job = await this.getJob(jobId);
            if (job.status === "complete") return job;
            if (Date.now() > deadline) {
                throw new Error(`job ${jobId} not complete after ${timeoutMs}ms`);
            }
            await new Promise((resolve) => setTimeout(resolve, intervalMs));
        }
    }
}

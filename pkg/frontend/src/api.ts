/**
 * Typed client for the /v1 session API. All numbers shown in the UI come
 * from these endpoints; the client does no clustering math of its own.
 */

export interface GridDoc {
    lines: number;
    columns: number;
    alpha: number;
    beta: number;
    rmax: number;
    rmin: number;
    spectrum_ratio: number;
}

export interface BotDoc {
    data_index: number;
    row: number;
    col: number;
    x: number;
    y: number;
}

export interface ProjectionDoc {
    format_version: number;
    seed: number;
    grid: GridDoc;
    bots: BotDoc[];
}

export interface TopoMapDoc {
    class_names: string[];
    class_thresholds: number[];
    point_heights: number[];
    grid_heights: number[][];
    color_classes: number[][];
}

export interface MergeDoc {
    left: number;
    right: number;
    height: number;
    size: number;
}

export interface DendrogramDoc {
    mode: string;
    merges: MergeDoc[];
    leaf_order: number[];
}

export interface ClusterDoc {
    k: number;
    mode: string;
    labels: number[];
    outliers: number[];
    marked: number[];
    outlier_class: number | null;
    dendrogram: DendrogramDoc;
}

export interface SessionStatusDoc {
    session_id: string;
    name: string;
    seed: number;
    status: "building" | "ready" | "failed";
    error: string | null;
    n_points: number | null;
}

export interface SessionRequest {
    points?: number[][];
    labels?: number[];
    matrix?: number[][];
    seed?: number;
    name?: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(public status: number, detail: string) {
        super(detail);
    }
}

export class ApiClient {
    constructor(private base = "", private fetchFn: FetchLike =
        (input, init) => fetch(input, init)) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const resp = await this.fetchFn(this.base + path, init);
        const body = await resp.json().catch(() => ({}));
        if (!resp.ok) {
            const detail = (body as { detail?: unknown }).detail;
            throw new ApiError(resp.status,
                typeof detail === "string" ? detail : JSON.stringify(detail));
        }
        return body as T;
    }

    createSession(req: SessionRequest): Promise<{ session_id: string }> {
        return this.request("/v1/sessions", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
    }

    status(sid: string): Promise<SessionStatusDoc> {
        return this.request(`/v1/sessions/${sid}`);
    }

    projection(sid: string): Promise<ProjectionDoc> {
        return this.request(`/v1/sessions/${sid}/projection`);
    }

    map(sid: string): Promise<TopoMapDoc> {
        return this.request(`/v1/sessions/${sid}/map`);
    }

    dendrogram(sid: string, mode: string): Promise<DendrogramDoc> {
        return this.request(
            `/v1/sessions/${sid}/dendrogram?mode=${encodeURIComponent(mode)}`);
    }

    cluster(sid: string, k: number, mode: string): Promise<ClusterDoc> {
        return this.request(`/v1/sessions/${sid}/cluster`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ k, mode }),
        });
    }

    outliers(sid: string, pointIds: number[],
             action: "mark" | "unmark"): Promise<ClusterDoc> {
        return this.request(`/v1/sessions/${sid}/outliers`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ point_ids: pointIds, action }),
        });
    }

    /** Poll until the projection job settles; returns the final status. */
    async waitReady(sid: string, intervalMs = 500,
                    timeoutMs = 600_000): Promise<SessionStatusDoc> {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const doc = await this.status(sid);
            if (doc.status !== "building") return doc;
            if (Date.now() > deadline) throw new ApiError(408, "build timed out");
            await new Promise((resolve) => setTimeout(resolve, intervalMs));
        }
    }
}

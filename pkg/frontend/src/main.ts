/**
 * Bootstraps the single-page app: session creation, control wiring, and
 * the render loop. All state lives in one ViewState; every mutation goes
 * through the service and the response replaces the relevant slice.
 * Mutating requests are serialized: controls stay disabled while one is
 * in flight.
 */

import { ApiClient } from "./api.js";
import { parseDatasetCsv } from "./csv.js";
import { DendrogramPanel } from "./dendrogram.js";
import { MapView } from "./mapView.js";
import { ViewState, clearSelection, initialState, panBy, toggleSelection,
         withArtifacts, withCluster, withDendrogram, withPending,
         withSession, withStatus } from "./state.js";

const api = new ApiClient("");
let state: ViewState = initialState();

const $ = <T extends HTMLElement>(id: string) =>
    document.getElementById(id) as T;

const mapView = new MapView($("map") as HTMLCanvasElement);
const dendroPanel = new DendrogramPanel($("dendro") as HTMLCanvasElement);

function setState(next: ViewState): void {
    state = next;
    renderControls();
    mapView.set(state);
    dendroPanel.set(state.dendrogram);
    if (state.sessionId) {
        window.location.hash = state.sessionId;
    }
}

function renderControls(): void {
    $("status").textContent = state.status;
    ($("k") as HTMLInputElement).value = String(state.k);
    ($("mode") as HTMLSelectElement).value = state.mode;
    $("selection").textContent = state.selection.length
        ? `selected: ${state.selection.join(", ")}`
        : "no points selected (click points to select)";
    const busy = state.pending || !state.projection;
    for (const id of ["cluster-btn", "mark-btn", "unmark-btn"]) {
        ($(id) as HTMLButtonElement).disabled = busy;
    }
    ($("dendro-mode") as HTMLSelectElement).value = state.dendrogramMode;
}

async function mutate(fn: () => Promise<ViewState>): Promise<void> {
    if (state.pending) return;  // one in-flight mutation per session
    setState(withPending(state, true));
    try {
        const next = await fn();
        setState(withPending(next, false));
    } catch (err) {
        setState(withPending(withStatus(state, `error: ${err}`), false));
    }
}

async function loadSession(sid: string): Promise<void> {
    setState(withSession(state, sid, "loading session..."));
    const status = await api.waitReady(sid);
    if (status.status === "failed") {
        setState(withStatus(state, `build failed: ${status.error}`));
        return;
    }
    const [projection, topo] = await Promise.all([
        api.projection(sid), api.map(sid),
    ]);
    setState(withArtifacts(state, projection, topo));
    await recluster();
}

async function recluster(): Promise<void> {
    await mutate(async () => {
        const doc = await api.cluster(state.sessionId!, state.k, state.mode);
        return withCluster(state, doc);
    });
}

function wireControls(): void {
    $("create-btn").addEventListener("click", async () => {
        const file = ($("dataset-file") as HTMLInputElement).files?.[0];
        if (!file) {
            setState(withStatus(state, "choose a dataset CSV first"));
            return;
        }
        const seed = parseInt(($("seed") as HTMLInputElement).value, 10) || 0;
        try {
            const parsed = parseDatasetCsv(await file.text());
            setState(withStatus(state, "projecting (can take a while)..."));
            const resp = await api.createSession({
                points: parsed.points,
                labels: parsed.labels,
                seed,
                name: file.name,
            });
            await loadSession(resp.session_id);
        } catch (err) {
            setState(withStatus(state, `error: ${err}`));
        }
    });

    $("cluster-btn").addEventListener("click", () => {
        state = { ...state,
                  k: parseInt(($("k") as HTMLInputElement).value, 10) || 1,
                  mode: ($("mode") as HTMLSelectElement).value };
        void recluster();
    });

    $("mark-btn").addEventListener("click", () => {
        if (!state.selection.length) return;
        void mutate(async () => {
            const doc = await api.outliers(state.sessionId!, state.selection,
                                           "mark");
            return clearSelection(withCluster(state, doc));
        });
    });

    $("unmark-btn").addEventListener("click", () => {
        const ids = state.selection.length
            ? state.selection
            : state.cluster?.marked ?? [];
        if (!ids.length) return;
        void mutate(async () => {
            const doc = await api.outliers(state.sessionId!, ids, "unmark");
            return clearSelection(withCluster(state, doc));
        });
    });

    $("dendro-mode").addEventListener("change", async () => {
        const mode = ($("dendro-mode") as HTMLSelectElement).value;
        if (!state.sessionId) return;
        const doc = await api.dendrogram(state.sessionId, mode);
        setState(withDendrogram(state, doc, mode));
    });

    mapView.onPan = (dx, dy) => {
        if (!state.projection) return;
        const width = state.projection.grid.columns;
        const height = state.projection.grid.lines * Math.sqrt(3) / 2;
        setState(panBy(state, dx, dy, width, height));
    };

    mapView.onTogglePoint = (pointId) => {
        setState(toggleSelection(state, pointId));
    };

    dendroPanel.onPick = (k) => {
        state = { ...state, k, mode: state.dendrogramMode };
        void recluster();
    };
}

wireControls();
renderControls();
const fromHash = window.location.hash.replace(/^#/, "");
if (fromHash) {
    void loadSession(fromHash).catch((err) => {
        setState(withStatus(initialState(), `error: ${err}`));
    });
}

/**
 * View state and its pure transitions. The state is a function of the
 * last service responses plus local selection; every transition returns
 * a new object so views can re-render from scratch.
 */

import { ClusterDoc, DendrogramDoc, ProjectionDoc, TopoMapDoc } from "./api.js";

export interface ViewState {
    sessionId: string | null;
    projection: ProjectionDoc | null;
    topo: TopoMapDoc | null;
    cluster: ClusterDoc | null;
    dendrogram: DendrogramDoc | null;
    dendrogramMode: string;
    k: number;
    mode: string;
    selection: number[];      // selected point ids, sorted
    hovered: number | null;
    panX: number;             // world units
    panY: number;
    pending: boolean;         // a mutating request is in flight
    status: string;
}

export function initialState(): ViewState {
    return {
        sessionId: null,
        projection: null,
        topo: null,
        cluster: null,
        dendrogram: null,
        dendrogramMode: "compact",
        k: 2,
        mode: "compact",
        selection: [],
        hovered: null,
        panX: 0,
        panY: 0,
        pending: false,
        status: "no session",
    };
}

export function withSession(s: ViewState, sessionId: string,
                            status: string): ViewState {
    return { ...initialState(), sessionId, status,
             k: s.k, mode: s.mode, dendrogramMode: s.dendrogramMode };
}

export function withArtifacts(s: ViewState, projection: ProjectionDoc,
                              topo: TopoMapDoc): ViewState {
    return { ...s, projection, topo, status: "ready" };
}

export function withCluster(s: ViewState, cluster: ClusterDoc): ViewState {
    return {
        ...s,
        cluster,
        k: cluster.k,
        mode: cluster.mode,
        dendrogram: cluster.dendrogram,
        dendrogramMode: cluster.mode,
        status: `k=${cluster.k} (${cluster.mode})`,
    };
}

export function withDendrogram(s: ViewState, dendrogram: DendrogramDoc,
                               mode: string): ViewState {
    return { ...s, dendrogram, dendrogramMode: mode };
}

export function withPending(s: ViewState, pending: boolean): ViewState {
    return { ...s, pending };
}

export function withStatus(s: ViewState, status: string): ViewState {
    return { ...s, status };
}

/** Toggle a point in the selection (additive), keeping it sorted. */
export function toggleSelection(s: ViewState, pointId: number): ViewState {
    const selection = s.selection.includes(pointId)
        ? s.selection.filter((p) => p !== pointId)
        : [...s.selection, pointId].sort((a, b) => a - b);
    return { ...s, selection };
}

export function clearSelection(s: ViewState): ViewState {
    return { ...s, selection: [] };
}

export function panBy(s: ViewState, dx: number, dy: number, width: number,
                      height: number): ViewState {
    // wrap the pan so coordinates never grow unboundedly
    const wrapv = (v: number, p: number) => ((v % p) + p) % p;
    return { ...s, panX: wrapv(s.panX + dx, width),
             panY: wrapv(s.panY + dy, height) };
}

/** The label to draw for a point: marked points show the outlier class. */
export function effectiveLabel(s: ViewState, pointId: number): number {
    if (!s.cluster) return 0;
    return s.cluster.labels[pointId];
}

export function isMarked(s: ViewState, pointId: number): boolean {
    return !!s.cluster && s.cluster.marked.includes(pointId);
}

export function isVolcano(s: ViewState, pointId: number): boolean {
    return !!s.cluster && s.cluster.outliers.includes(pointId);
}

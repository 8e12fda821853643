import { describe, expect, it } from "vitest";

import type { ClusterDoc } from "../src/api.js";
import { clearSelection, effectiveLabel, initialState, isMarked, isVolcano,
         panBy, toggleSelection, withCluster, withPending,
         withSession } from "../src/state.js";

function clusterDoc(): ClusterDoc {
    return {
        k: 3,
        mode: "compact",
        labels: [1, 1, 2, 2, 3, 4],
        outliers: [4],
        marked: [5],
        outlier_class: 4,
        dendrogram: { mode: "compact", merges: [], leaf_order: [] },
    };
}

describe("selection", () => {
    it("toggles and stays sorted", () => {
        let s = initialState();
        s = toggleSelection(s, 5);
        s = toggleSelection(s, 2);
        expect(s.selection).toEqual([2, 5]);
        s = toggleSelection(s, 5);
        expect(s.selection).toEqual([2]);
        expect(clearSelection(s).selection).toEqual([]);
    });
});

describe("pan", () => {
    it("wraps within the map period", () => {
        let s = initialState();
        s = panBy(s, 12, -3, 10, 8);
        expect(s.panX).toBeCloseTo(2);
        expect(s.panY).toBeCloseTo(5);
    });
});

describe("cluster response", () => {
    it("updates k, mode, dendrogram and point classifiers", () => {
        let s = withCluster(initialState(), clusterDoc());
        expect(s.k).toBe(3);
        expect(s.mode).toBe("compact");
        expect(effectiveLabel(s, 0)).toBe(1);
        expect(effectiveLabel(s, 5)).toBe(4);
        expect(isMarked(s, 5)).toBe(true);
        expect(isMarked(s, 0)).toBe(false);
        expect(isVolcano(s, 4)).toBe(true);
        expect(s.status).toContain("k=3");
    });
});

describe("session reset", () => {
    it("keeps control choices but clears artifacts", () => {
        let s = withCluster(initialState(), clusterDoc());
        s = toggleSelection(s, 1);
        const fresh = withSession(s, "abc", "loading");
        expect(fresh.sessionId).toBe("abc");
        expect(fresh.cluster).toBeNull();
        expect(fresh.selection).toEqual([]);
        expect(fresh.k).toBe(3);  // sticky user choice
    });
});

describe("pending flag", () => {
    it("is a pure toggle", () => {
        const s = withPending(initialState(), true);
        expect(s.pending).toBe(true);
        expect(withPending(s, false).pending).toBe(false);
    });
});

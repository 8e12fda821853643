import { describe, expect, it } from "vitest";

import type { DendrogramDoc } from "../src/api.js";
import { kForMergeIndex, panelHeights } from "../src/dendrogram.js";

function dendro(heights: number[]): DendrogramDoc {
    return {
        mode: "compact",
        merges: heights.map((h, i) => ({ left: i, right: i + 1, height: h,
                                         size: i + 2 })),
        leaf_order: [],
    };
}

describe("kForMergeIndex", () => {
    it("cutting below the last merge gives two clusters", () => {
        // 10 leaves -> 9 merges, last merge index 8
        expect(kForMergeIndex(10, 8)).toBe(2);
    });
    it("cutting below the first merge gives all singletons", () => {
        expect(kForMergeIndex(10, 0)).toBe(10);
    });
});

describe("panelHeights", () => {
    it("shows the top merges in ascending order with original indices", () => {
        const d = dendro([1, 2, 3, 4, 5, 6]);
        const shown = panelHeights(d, 4);
        expect(shown.map((m) => m.height)).toEqual([3, 4, 5, 6]);
        expect(shown.map((m) => m.index)).toEqual([2, 3, 4, 5]);
    });
    it("handles short dendrograms", () => {
        const d = dendro([1, 2]);
        expect(panelHeights(d, 10)).toHaveLength(2);
    });
});

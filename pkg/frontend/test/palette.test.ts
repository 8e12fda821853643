import { describe, expect, it } from "vitest";

import { clusterColor, rgbCss, terrainColor } from "../src/palette.js";

describe("terrainColor", () => {
    it("hits the anchor colors", () => {
        expect(terrainColor(0)).toEqual([24, 94, 190]);
        expect(terrainColor(1)).toEqual([255, 255, 255]);
    });
    it("interpolates monotonically toward white at the top", () => {
        const mid = terrainColor(0.8);
        const high = terrainColor(0.95);
        expect(high[0]).toBeGreaterThan(mid[0]);
    });
    it("clamps out-of-range heights", () => {
        expect(terrainColor(-1)).toEqual(terrainColor(0));
        expect(terrainColor(2)).toEqual(terrainColor(1));
    });
});

describe("clusterColor", () => {
    it("gives distinct stable colors per label", () => {
        const a = clusterColor(1);
        expect(clusterColor(1)).toBe(a);
        const seen = new Set(
            Array.from({ length: 12 }, (_, i) => clusterColor(i + 1)));
        expect(seen.size).toBe(12);
    });
});

describe("rgbCss", () => {
    it("formats css colors", () => {
        expect(rgbCss([1, 2, 3])).toBe("rgb(1,2,3)");
    });
});

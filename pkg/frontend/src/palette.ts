/** Hypsometric terrain palette and categorical cluster colors. */

export type Rgb = [number, number, number];

/** Palette anchors matching the service's class thresholds (blue sea ->
 * green lowland -> brown hills -> white snow). */
const STOPS: Array<[number, Rgb]> = [
    [0.0, [24, 94, 190]],
    [0.2, [64, 164, 223]],
    [0.45, [88, 169, 79]],
    [0.7, [150, 114, 71]],
    [0.9, [200, 200, 200]],
    [1.0, [255, 255, 255]],
];

/** Interpolated terrain color for a normalized height in [0, 1]. */
export function terrainColor(h: number): Rgb {
    const x = Math.min(1, Math.max(0, h));
    for (let i = 1; i < STOPS.length; i++) {
        const [x1, c1] = STOPS[i - 1];
        const [x2, c2] = STOPS[i];
        if (x <= x2) {
            const t = x2 === x1 ? 0 : (x - x1) / (x2 - x1);
            return [
                Math.round(c1[0] + t * (c2[0] - c1[0])),
                Math.round(c1[1] + t * (c2[1] - c1[1])),
                Math.round(c1[2] + t * (c2[2] - c1[2])),
            ];
        }
    }
    return STOPS[STOPS.length - 1][1];
}

export function rgbCss([r, g, b]: Rgb): string {
    return `rgb(${r},${g},${b})`;
}

/** Distinct, stable colors for cluster ids 1..n (golden-angle hues). */
export function clusterColor(label: number): string {
    if (label <= 0) return "#888888";
    const hue = (label * 137.50776405) % 360;
    const light = label % 2 === 0 ? 42 : 55;
    return `hsl(${hue.toFixed(1)}, 85%, ${light}%)`;
}

export const OUTLIER_MARK_COLOR = "#ff00d0";
export const VOLCANO_RING_COLOR = "#d62400";

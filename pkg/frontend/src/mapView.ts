/**
 * Canvas rendering of the topographic map with the clustered points on
 * top. The torus is drawn as a 3x3 tiling shifted by the pan offset, so
 * dragging across any border wraps seamlessly.
 */

import { ProjectionDoc, TopoMapDoc } from "./api.js";
import { clusterColor, OUTLIER_MARK_COLOR, rgbCss, terrainColor,
         VOLCANO_RING_COLOR } from "./palette.js";
import { ViewState, effectiveLabel, isMarked, isVolcano } from "./state.js";
import { nearestPoint, screenToWorld, tileOffsets, wrap } from "./torus.js";

const ROW_PITCH = Math.sqrt(3) / 2;

export interface MapGeometry {
    width: number;   // world units (columns)
    height: number;  // world units (lines * sqrt(3)/2)
    scale: number;   // pixels per world unit
}

export function geometryFor(proj: ProjectionDoc,
                            canvasWidth: number): MapGeometry {
    const width = proj.grid.columns;
    const height = proj.grid.lines * ROW_PITCH;
    return { width, height, scale: canvasWidth / width };
}

export class MapView {
    onTogglePoint: ((pointId: number) => void) | null = null;
    onPan: ((dx: number, dy: number) => void) | null = null;
    private dragging = false;
    private moved = false;
    private lastX = 0;
    private lastY = 0;
    private state: ViewState | null = null;

    constructor(private canvas: HTMLCanvasElement) {
        canvas.addEventListener("mousedown", (ev) => {
            this.dragging = true;
            this.moved = false;
            this.lastX = ev.clientX;
            this.lastY = ev.clientY;
        });
        window.addEventListener("mouseup", (ev) => {
            if (this.dragging && !this.moved) this.handleClick(ev);
            this.dragging = false;
        });
        window.addEventListener("mousemove", (ev) => {
            if (!this.dragging || !this.state?.projection) return;
            const dxPix = ev.clientX - this.lastX;
            const dyPix = ev.clientY - this.lastY;
            if (Math.abs(dxPix) + Math.abs(dyPix) > 2) this.moved = true;
            this.lastX = ev.clientX;
            this.lastY = ev.clientY;
            const geo = this.geometry()!;
            this.onPan?.(dxPix / geo.scale, dyPix / geo.scale);
        });
    }

    private geometry(): MapGeometry | null {
        if (!this.state?.projection) return null;
        return geometryFor(this.state.projection, this.canvas.width);
    }

    set(state: ViewState): void {
        this.state = state;
        this.render();
    }

    render(): void {
        const ctx = this.canvas.getContext("2d")!;
        ctx.fillStyle = "#14171c";
        ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
        const s = this.state;
        if (!s?.projection || !s.topo) return;
        const geo = this.geometry()!;
        this.canvas.height = Math.round(geo.height * geo.scale);
        this.drawTerrain(ctx, s.topo, geo, s.panX, s.panY);
        this.drawPoints(ctx, s, geo);
    }

    private drawTerrain(ctx: CanvasRenderingContext2D, topo: TopoMapDoc,
                        geo: MapGeometry, panX: number, panY: number): void {
        const lines = topo.grid_heights.length;
        const columns = topo.grid_heights[0].length;
        const cellW = geo.width / columns * geo.scale;
        const cellH = geo.height / lines * geo.scale;
        for (let r = 0; r < lines; r++) {
            for (let c = 0; c < columns; c++) {
                ctx.fillStyle = rgbCss(terrainColor(topo.grid_heights[r][c]));
                // wrapped cell origin under the current pan
                const x = wrap((c / columns) * geo.width + panX, geo.width);
                const y = wrap((r / lines) * geo.height + panY, geo.height);
                ctx.fillRect(x * geo.scale - 1, y * geo.scale - 1,
                             cellW + 2, cellH + 2);
            }
        }
    }

    private drawPoints(ctx: CanvasRenderingContext2D, s: ViewState,
                       geo: MapGeometry): void {
        const proj = s.projection!;
        const radius = Math.max(3, geo.scale * 0.3);
        for (const tile of tileOffsets(geo.width, geo.height)) {
            for (const bot of proj.bots) {
                const x = (wrap(bot.x + s.panX, geo.width) + tile.dx) * geo.scale;
                const y = (wrap(bot.y + s.panY, geo.height) + tile.dy) * geo.scale;
                if (x < -10 || y < -10 || x > this.canvas.width + 10 ||
                        y > this.canvas.height + 10) continue;
                const id = bot.data_index;
                const marked = isMarked(s, id);
                ctx.beginPath();
                ctx.arc(x, y, radius, 0, 2 * Math.PI);
                ctx.fillStyle = marked ? OUTLIER_MARK_COLOR
                    : clusterColor(effectiveLabel(s, id));
                ctx.fill();
                if (isVolcano(s, id)) {
                    ctx.strokeStyle = VOLCANO_RING_COLOR;
                    ctx.lineWidth = 2;
                    ctx.stroke();
                }
                if (s.selection.includes(id)) {
                    ctx.strokeStyle = "#ffffff";
                    ctx.lineWidth = 2;
                    ctx.setLineDash([3, 2]);
                    ctx.stroke();
                    ctx.setLineDash([]);
                }
            }
        }
    }

    private handleClick(ev: MouseEvent): void {
        const s = this.state;
        if (!s?.projection || !this.onTogglePoint) return;
        const geo = this.geometry()!;
        const rect = this.canvas.getBoundingClientRect();
        const px = (ev.clientX - rect.left) * (this.canvas.width / rect.width);
        const py = (ev.clientY - rect.top) * (this.canvas.height / rect.height);
        if (px < 0 || py < 0 || px > this.canvas.width ||
                py > this.canvas.height) return;
        const world = screenToWorld(px, py, s.panX, s.panY, geo.scale,
                                    geo.width, geo.height);
        const xs = s.projection.bots.map((b) => b.x);
        const ys = s.projection.bots.map((b) => b.y);
        const hit = nearestPoint(xs, ys, world.x, world.y, geo.width,
                                 geo.height, 1.0);
        if (hit >= 0) this.onTogglePoint(s.projection.bots[hit].data_index);
    }
}

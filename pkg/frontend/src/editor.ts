/** Canvas rendering and pointer interactions for the graph editor. */

import { GraphDraft, ROOT_ID } from "./graph.js";
import { classColor } from "./wireframe.js";
import type { ComponentClassInfo } from "./types.js";

const NODE_W = 120;
const NODE_H = 40;

interface NodePos {
  x: number;
  y: number;
}

export class EditorCanvas {
  positions = new Map<number, NodePos>();
  selected: number | null = null;
  connectFrom: number | null = null;
  onChange: () => void = () => {};
  onError: (message: string) => void = () => {};

  private dragging: number | null = null;
  private dragOffset = { x: 0, y: 0 };
  private classInfo = new Map<string, ComponentClassInfo>();

  constructor(
    private canvas: HTMLCanvasElement,
    private draft: GraphDraft,
    private predicatePicker: () => string,
    classes: ComponentClassInfo[],
  ) {
    for (const cls of classes) this.classInfo.set(cls.name, cls);
    canvas.addEventListener("mousedown", (e) => this.onDown(e));
    canvas.addEventListener("mousemove", (e) => this.onMove(e));
    canvas.addEventListener("mouseup", () => (this.dragging = null));
  }

  placeNode(id: number): void {
    const index = this.positions.size;
    this.positions.set(id, {
      x: 30 + (index % 3) * (NODE_W + 40),
      y: 30 + Math.floor(index / 3) * (NODE_H + 40),
    });
  }

  dropNode(id: number): void {
    this.positions.delete(id);
    if (this.selected === id) this.selected = null;
    if (this.connectFrom === id) this.connectFrom = null;
  }

  private nodeAt(x: number, y: number): number | null {
    for (const [id, pos] of [...this.positions.entries()].reverse()) {
      if (x >= pos.x && x <= pos.x + NODE_W && y >= pos.y && y <= pos.y + NODE_H) {
        return id;
      }
    }
    return null;
  }

  private canvasPoint(e: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  }

  private onDown(e: MouseEvent): void {
    const { x, y } = this.canvasPoint(e);
    const hit = this.nodeAt(x, y);
    if (hit === null) {
      this.selected = null;
      this.connectFrom = null;
      this.draw();
      return;
    }
    if (e.shiftKey) {
      if (this.connectFrom === null) {
        this.connectFrom = hit;
      } else if (this.connectFrom !== hit) {
        try {
          this.draft.addRelation(this.connectFrom, this.predicatePicker(), hit);
          this.onChange();
        } catch (err) {
          this.onError((err as Error).message);
        }
        this.connectFrom = null;
      }
    } else {
      this.selected = hit;
      this.dragging = hit;
      const pos = this.positions.get(hit)!;
      this.dragOffset = { x: x - pos.x, y: y - pos.y };
    }
    this.draw();
  }

  private onMove(e: MouseEvent): void {
    if (this.dragging === null) return;
    const { x, y } = this.canvasPoint(e);
    this.positions.set(this.dragging, {
      x: x - this.dragOffset.x,
      y: y - this.dragOffset.y,
    });
    this.draw();
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.font = "11px monospace";

    for (const [index, rel] of this.draft.relations.entries()) {
      const a = this.positions.get(rel.s);
      const b = this.positions.get(rel.o);
      if (!a || !b) continue;
      const x1 = a.x + NODE_W / 2;
      const y1 = a.y + NODE_H / 2;
      const x2 = b.x + NODE_W / 2;
      const y2 = b.y + NODE_H / 2;
      ctx.strokeStyle = rel.p === "inside" ? "#7a5cc4" : "#888";
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      ctx.moveTo(x1, y1);
      ctx.lineTo(x2, y2);
      ctx.stroke();
      const angle = Math.atan2(y2 - y1, x2 - x1);
      const tipX = (x1 + x2) / 2 + 18 * Math.cos(angle);
      const tipY = (y1 + y2) / 2 + 18 * Math.sin(angle);
      ctx.beginPath();
      ctx.moveTo(tipX, tipY);
      ctx.lineTo(tipX - 9 * Math.cos(angle - 0.4), tipY - 9 * Math.sin(angle - 0.4));
      ctx.lineTo(tipX - 9 * Math.cos(angle + 0.4), tipY - 9 * Math.sin(angle + 0.4));
      ctx.closePath();
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fill();
      ctx.fillStyle = "#333";
      ctx.fillText(`${index + 1}:${rel.p}`, (x1 + x2) / 2 + 4, (y1 + y2) / 2 - 4);
    }

    for (const [id, pos] of this.positions) {
      const name = this.draft.components.get(id);
      if (!name) continue;
      const info = this.classInfo.get(name);
      ctx.fillStyle = classColor(info?.id ?? 0, info?.container ?? false);
      ctx.globalAlpha = 0.35;
      ctx.fillRect(pos.x, pos.y, NODE_W, NODE_H);
      ctx.globalAlpha = 1.0;
      ctx.lineWidth = id === this.selected || id === this.connectFrom ? 3 : 1.5;
      ctx.strokeStyle = id === this.connectFrom ? "#d4572a" : "#444";
      ctx.strokeRect(pos.x, pos.y, NODE_W, NODE_H);
      ctx.fillStyle = "#111";
      ctx.fillText(`${name}[${id}]`, pos.x + 6, pos.y + 24);
    }
  }
}

export { ROOT_ID };

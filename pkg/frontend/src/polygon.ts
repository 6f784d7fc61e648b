// Template drawing state machine: click to add vertices, drag to move,
// double-click or Enter to close. Nothing is submitted below 3 vertices.

export type Point = [number, number];

export class PolygonDraw {
  vertices: Point[] = [];
  closed = false;
  message: string | null = null;

  /** Click in image coordinates; ignored once the polygon is closed. */
  addVertex(x: number, y: number): void {
    if (this.closed) return;
    this.vertices.push([x, y]);
    this.message = null;
  }

  moveVertex(index: number, x: number, y: number): void {
    if (index < 0 || index >= this.vertices.length) return;
    this.vertices[index] = [x, y];
  }

  deleteVertex(index: number): void {
    if (this.closed) return;
    if (index < 0 || index >= this.vertices.length) return;
    this.vertices.splice(index, 1);
  }

  /** Index of the vertex within `radius` of (x, y), or -1. */
  hitTest(x: number, y: number, radius = 4): number {
    for (let i = 0; i < this.vertices.length; i++) {
      const [vx, vy] = this.vertices[i];
      if (Math.hypot(vx - x, vy - y) <= radius) return i;
    }
    return -1;
  }

  /** Close the polygon (double-click / Enter). False + message below 3 vertices. */
  close(): boolean {
    if (this.vertices.length < 3) {
      this.message = `a template needs at least 3 points (have ${this.vertices.length})`;
      return false;
    }
    this.closed = true;
    this.message = null;
    return true;
  }

  reset(): void {
    this.vertices = [];
    this.closed = false;
    this.message = null;
  }
}

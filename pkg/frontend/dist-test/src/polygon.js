// Template drawing state machine: click to add vertices, drag to move,
// double-click or Enter to close. Nothing is submitted below 3 vertices.
export class PolygonDraw {
    vertices = [];
    closed = false;
    message = null;
    /** Click in image coordinates; ignored once the polygon is closed. */
    addVertex(x, y) {
        if (this.closed)
            return;
        this.vertices.push([x, y]);
        this.message = null;
    }
    moveVertex(index, x, y) {
        if (index < 0 || index >= this.vertices.length)
            return;
        this.vertices[index] = [x, y];
    }
    deleteVertex(index) {
        if (this.closed)
            return;
        if (index < 0 || index >= this.vertices.length)
            return;
        this.vertices.splice(index, 1);
    }
    /** Index of the vertex within `radius` of (x, y), or -1. */
    hitTest(x, y, radius = 4) {
        for (let i = 0; i < this.vertices.length; i++) {
            const [vx, vy] = this.vertices[i];
            if (Math.hypot(vx - x, vy - y) <= radius)
                return i;
        }
        return -1;
    }
    /** Close the polygon (double-click / Enter). False + message below 3 vertices. */
    close() {
        if (this.vertices.length < 3) {
            this.message = `a template needs at least 3 points (have ${this.vertices.length})`;
            return false;
        }
        this.closed = true;
        this.message = null;
        return true;
    }
    reset() {
        this.vertices = [];
        this.closed = false;
        this.message = null;
    }
}

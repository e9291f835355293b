// Translates pointer/touch input into camera operations and tap selection.
// Works on event-shaped plain objects so the logic is testable headless.
//
// Bindings: left-drag / single-touch orbit; wheel / two-finger pinch zoom;
// right-drag / two-finger drag pan; short still press = tap-to-select.

export interface PointerLike {
  clientX: number;
  clientY: number;
  button?: number;
}

export interface TouchListLike {
  length: number;
  [index: number]: { clientX: number; clientY: number };
}

export interface GestureCallbacks {
  orbit(deltaX: number, deltaY: number): void;
  zoom(factor: number): void;
  pan(deltaX: number, deltaY: number): void;
  tap(x: number, y: number): void;
}

const TAP_MAX_MS = 350;
const TAP_MAX_MOVE = 8;

export class GestureController {
  private dragging = false;
  private panning = false;
  private lastX = 0;
  private lastY = 0;
  private downX = 0;
  private downY = 0;
  private downAt = 0;
  private moved = 0;
  private pinchDistance = 0;
  private touchPanX = 0;
  private touchPanY = 0;

  constructor(
    private callbacks: GestureCallbacks,
    private now: () => number = () => Date.now(),
  ) {}

  pointerDown(ev: PointerLike): void {
    this.dragging = true;
    this.panning = ev.button === 2;
    this.lastX = this.downX = ev.clientX;
    this.lastY = this.downY = ev.clientY;
    this.downAt = this.now();
    this.moved = 0;
  }

  pointerMove(ev: PointerLike): void {
    if (!this.dragging) return;
    const dx = ev.clientX - this.lastX;
    const dy = ev.clientY - this.lastY;
    this.lastX = ev.clientX;
    this.lastY = ev.clientY;
    this.moved += Math.abs(dx) + Math.abs(dy);
    if (this.panning) {
      this.callbacks.pan(-dx * 0.25, dy * 0.25);
    } else {
      this.callbacks.orbit(-dx * 0.008, -dy * 0.008);
    }
  }

  pointerUp(ev: PointerLike): void {
    if (!this.dragging) return;
    this.dragging = false;
    const quick = this.now() - this.downAt <= TAP_MAX_MS;
    if (!this.panning && quick && this.moved <= TAP_MAX_MOVE) {
      this.callbacks.tap(ev.clientX, ev.clientY);
    }
    this.panning = false;
  }

  wheel(deltaY: number): void {
    this.callbacks.zoom(deltaY > 0 ? 1.1 : 1 / 1.1);
  }

  private static distance(touches: TouchListLike): number {
    const dx = touches[0].clientX - touches[1].clientX;
    const dy = touches[0].clientY - touches[1].clientY;
    return Math.hypot(dx, dy) || 1;
  }

  private static center(touches: TouchListLike): { x: number; y: number } {
    return {
      x: (touches[0].clientX + touches[1].clientX) / 2,
      y: (touches[0].clientY + touches[1].clientY) / 2,
    };
  }

  touchStart(touches: TouchListLike): void {
    if (touches.length === 1) {
      this.pointerDown({ clientX: touches[0].clientX, clientY: touches[0].clientY, button: 0 });
    } else if (touches.length >= 2) {
      this.dragging = false;
      this.pinchDistance = GestureController.distance(touches);
      const c = GestureController.center(touches);
      this.touchPanX = c.x;
      this.touchPanY = c.y;
    }
  }

  touchMove(touches: TouchListLike): void {
    if (touches.length === 1) {
      this.pointerMove({ clientX: touches[0].clientX, clientY: touches[0].clientY });
    } else if (touches.length >= 2) {
      const dist = GestureController.distance(touches);
      if (this.pinchDistance > 0) {
        const ratio = dist / this.pinchDistance;
        if (ratio !== 1) this.callbacks.zoom(1 / ratio);
      }
      this.pinchDistance = dist;
      const c = GestureController.center(touches);
      this.callbacks.pan(-(c.x - this.touchPanX) * 0.25, (c.y - this.touchPanY) * 0.25);
      this.touchPanX = c.x;
      this.touchPanY = c.y;
    }
  }

  touchEnd(remaining: TouchListLike, changed: PointerLike): void {
    if (remaining.length === 0) {
      this.pointerUp(changed);
      this.pinchDistance = 0;
    } else if (remaining.length === 1) {
      this.pinchDistance = 0;
      this.lastX = remaining[0].clientX;
      this.lastY = remaining[0].clientY;
      this.dragging = true;
      this.panning = false;
      this.moved = TAP_MAX_MOVE + 1; // transition out of pinch can't be a tap
    }
  }
}

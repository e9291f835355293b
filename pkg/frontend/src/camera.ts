// Orbit camera math, renderer-agnostic: spherical angles around a target.
// Mouse drag and single-touch orbit; wheel and pinch zoom; right-drag and
// two-finger drag pan.

import { Vec3 } from "./layout.js";

export interface CameraPose {
  position: Vec3;
  target: Vec3;
}

export class OrbitCamera {
  theta = Math.PI / 4; // azimuth
  phi = Math.PI / 3; // inclination from +Y
  distance: number;
  target: Vec3 = { x: 0, y: 0, z: 0 };

  constructor(
    distance = 160,
    private minDistance = 10,
    private maxDistance = 2000,
  ) {
    this.distance = distance;
  }

  orbit(deltaTheta: number, deltaPhi: number): void {
    this.theta += deltaTheta;
    const EPS = 1e-3;
    this.phi = Math.min(Math.PI - EPS, Math.max(EPS, this.phi + deltaPhi));
  }

  /** factor > 1 zooms out, < 1 zooms in. */
  zoom(factor: number): void {
    this.distance = Math.min(this.maxDistance, Math.max(this.minDistance, this.distance * factor));
  }

  /** Pinch: spread ratio > 1 (fingers apart) zooms in. Ratio 1 is identity. */
  pinch(ratio: number): void {
    if (ratio > 0) this.zoom(1 / ratio);
  }

  /** Pan in the camera's screen plane; dx/dy in world units. */
  pan(dx: number, dy: number): void {
    const sinPhi = Math.sin(this.phi);
    const right = { x: Math.cos(this.theta), y: 0, z: -Math.sin(this.theta) };
    const fwd = { x: sinPhi * Math.sin(this.theta), y: 0, z: sinPhi * Math.cos(this.theta) };
    const up = { x: -Math.cos(this.phi) * fwd.x, y: sinPhi, z: -Math.cos(this.phi) * fwd.z };
    this.target.x += right.x * dx + up.x * dy;
    this.target.y += right.y * dx + up.y * dy;
    this.target.z += right.z * dx + up.z * dy;
  }

  position(): Vec3 {
    const sinPhi = Math.sin(this.phi);
    return {
      x: this.target.x + this.distance * sinPhi * Math.sin(this.theta),
      y: this.target.y + this.distance * Math.cos(this.phi),
      z: this.target.z + this.distance * sinPhi * Math.cos(this.theta),
    };
  }

  pose(): CameraPose {
    return { position: this.position(), target: { ...this.target } };
  }
}

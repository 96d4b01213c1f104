/**
 * Camera pose state and the gesture-to-pose mapping.
 *
 * The pose mirrors the service's /api/view parameters: position (x, y, z)
 * inside the advertised valid zone, yaw/pitch in degrees (yaw 0 faces the
 * image plane, positive yaw turns right, positive pitch looks up).
 */

export interface Pose {
  x: number;
  y: number;
  z: number;
  yaw: number;
  pitch: number;
}

/** Axis-aligned camera box from /api/meta valid_zone. */
export interface Zone {
  x: [number, number];
  y: [number, number];
  z: [number, number];
}

// documented mapping: dragging right by k pixels adds k * YAW_PER_PIXEL
// degrees of yaw; dragging up adds k * PITCH_PER_PIXEL degrees of pitch
export const YAW_PER_PIXEL = 0.25;
export const PITCH_PER_PIXEL = 0.25;
export const PITCH_LIMIT = 85;
// a full-canvas pan drag (PAN_FULL_DRAG_PX pixels) crosses the whole zone
export const PAN_FULL_DRAG_PX = 500;
// wheel notches needed to dolly across the zone's depth
export const DOLLY_STEPS = 12;

const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

/** Wrap a yaw angle into [-180, 180). */
export function wrapYaw(yaw: number): number {
  return ((((yaw + 180) % 360) + 360) % 360) - 180;
}

/**
 * Default pose: centre of the zone's camera-plane face, looking straight
 * at the image plane. Matches the service's own /api/view defaults.
 */
export function defaultPose(zone: Zone): Pose {
  return {
    x: (zone.x[0] + zone.x[1]) / 2,
    y: (zone.y[0] + zone.y[1]) / 2,
    z: 0,
    yaw: 0,
    pitch: 0,
  };
}

/** Clamp position into the zone, pitch into +-PITCH_LIMIT, wrap yaw. */
export function clampPose(pose: Pose, zone: Zone): Pose {
  return {
    x: clamp(pose.x, zone.x[0], zone.x[1]),
    y: clamp(pose.y, zone.y[0], zone.y[1]),
    z: clamp(pose.z, zone.z[0], zone.z[1]),
    yaw: wrapYaw(pose.yaw),
    pitch: clamp(pose.pitch, -PITCH_LIMIT, PITCH_LIMIT),
  };
}

export function inZone(pose: Pose, zone: Zone, eps = 1e-9): boolean {
  return (
    pose.x >= zone.x[0] - eps && pose.x <= zone.x[1] + eps &&
    pose.y >= zone.y[0] - eps && pose.y <= zone.y[1] + eps &&
    pose.z >= zone.z[0] - eps && pose.z <= zone.z[1] + eps
  );
}

/** Orbit drag: screen dx turns the camera, screen dy tilts it. */
export function applyOrbit(pose: Pose, dx: number, dy: number): Pose {
  // screen y grows downward, so dragging up (dy < 0) must look up
  return { ...pose, yaw: pose.yaw + dx * YAW_PER_PIXEL, pitch: pose.pitch - dy * PITCH_PER_PIXEL };
}

/**
 * Pan drag: translate the camera in its x/y plane so the image content
 * follows the pointer (screen right is world +x, screen down is world +y).
 */
export function applyPan(pose: Pose, dx: number, dy: number, zone: Zone): Pose {
  const sx = (zone.x[1] - zone.x[0]) / PAN_FULL_DRAG_PX;
  const sy = (zone.y[1] - zone.y[0]) / PAN_FULL_DRAG_PX;
  return { ...pose, x: pose.x - dx * sx, y: pose.y - dy * sy };
}

/** Dolly: positive steps move toward the image plane (z toward 0). */
export function applyDolly(pose: Pose, steps: number, zone: Zone): Pose {
  const dz = (zone.z[1] - zone.z[0]) / DOLLY_STEPS;
  return { ...pose, z: pose.z + steps * dz };
}

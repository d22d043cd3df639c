// Joint-angle to limb-rotation mapping for the 2-D robot figure.
//
// This is the single place that interprets servo degrees visually:
//   - Every servo reads 0..180 with 90 as the neutral midpoint.
//   - A limb's visual rotation is (angle - 90) degrees about its pivot:
//     arms pivot at the shoulders, legs at the hips, feet at the ankles.
//   - The head turn is (angle - 90) scaled by 1/3 so a full neck sweep
//     reads as a turn instead of a spin.
//   - Left-side limbs are mirrored (negated) so equal left/right angles
//     produce a symmetric pose.
// The view never invents angles: transforms are computed only from
// telemetry frames the service actually sent.

import { JointName, TelemetryFrame } from "./types.js";

export interface LimbRotations {
  leftArm: number;
  rightArm: number;
  leftLeg: number;
  rightLeg: number;
  leftFoot: number;
  rightFoot: number;
  head: number;
}

const HEAD_SCALE = 1 / 3;

export function limbRotations(angles: Record<JointName, number>): LimbRotations {
  return {
    leftArm: 90 - angles.left_arm,
    rightArm: angles.right_arm - 90,
    leftLeg: 90 - angles.left_leg,
    rightLeg: angles.right_leg - 90,
    leftFoot: 90 - angles.left_foot,
    rightFoot: angles.right_foot - 90,
    head: (angles.neck - 90) * HEAD_SCALE,
  };
}

export function neutralRotations(): LimbRotations {
  return {
    leftArm: 0,
    rightArm: 0,
    leftLeg: 0,
    rightLeg: 0,
    leftFoot: 0,
    rightFoot: 0,
    head: 0,
  };
}

// Peak-to-peak visual sweep of each arm over a telemetry sequence; the
// greeting gesture must make at least one arm sweep visibly (>= 45 deg).
export function armSweep(frames: TelemetryFrame[]): {
  left: number;
  right: number;
} {
  if (frames.length === 0) return { left: 0, right: 0 };
  let minL = Infinity;
  let maxL = -Infinity;
  let minR = Infinity;
  let maxR = -Infinity;
  for (const frame of frames) {
    const r = limbRotations(frame.angles);
    minL = Math.min(minL, r.leftArm);
    maxL = Math.max(maxL, r.leftArm);
    minR = Math.min(minR, r.rightArm);
    maxR = Math.max(maxR, r.rightArm);
  }
  return { left: maxL - minL, right: maxR - minR };
}

// SVG ids of the pivoting groups inside the inline figure in index.html,
// paired with the pivot point each one rotates about (viewBox units).
const PIVOTS: Record<keyof LimbRotations, { id: string; x: number; y: number }> = {
  leftArm: { id: "left-arm", x: 70, y: 80 },
  rightArm: { id: "right-arm", x: 130, y: 80 },
  leftLeg: { id: "left-leg", x: 85, y: 140 },
  rightLeg: { id: "right-leg", x: 115, y: 140 },
  leftFoot: { id: "left-foot", x: 85, y: 175 },
  rightFoot: { id: "right-foot", x: 115, y: 175 },
  head: { id: "head", x: 100, y: 55 },
};

export function applyRotations(root: ParentNode, rotations: LimbRotations): void {
  for (const limb of Object.keys(PIVOTS) as (keyof LimbRotations)[]) {
    const { id, x, y } = PIVOTS[limb];
    const node = root.querySelector(`#${id}`);
    if (node instanceof SVGElement) {
      node.setAttribute(
        "transform",
        `rotate(${rotations[limb].toFixed(2)} ${x} ${y})`,
      );
    }
  }
}

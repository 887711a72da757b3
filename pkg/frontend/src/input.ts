// Pointer -> control conversion: heading toward the pointer, speed from how
// far it sits from the evader.  The radius scheme lets a player realize any
// admissible velocity, not just full-speed headings.

export interface PointerControl {
  heading: [number, number];
  speed: number;
}

/**
 * Convert a pointer position (canvas pixels) into a control, both relative to
 * the evader's screen position.  speed = clamp(distance / deadband, 0, 1);
 * a pointer on the evader commands a stop (zero heading, zero speed).
 */
export function pointerToControl(
  pointerX: number,
  pointerY: number,
  evaderX: number,
  evaderY: number,
  deadbandRadius: number,
): PointerControl {
  const dx = pointerX - evaderX;
  const dy = pointerY - evaderY;
  const dist = Math.hypot(dx, dy);
  if (dist === 0) {
    return { heading: [0, 0], speed: 0 };
  }
  // canvas y grows downward; world heading y grows upward
  return {
    heading: [dx / dist, -dy / dist],
    speed: Math.min(1, Math.max(0, dist / deadbandRadius)),
  };
}

import { describe, expect, it } from "vitest";

import {
  clamp01,
  formatProbability,
  groupColor,
  shadeTextColor,
  shadeToColor,
  shadeToLightness,
} from "../src/format.js";

describe("formatProbability", () => {
  it("renders six decimal places", () => {
    expect(formatProbability(0.383333)).toBe("0.383333");
    expect(formatProbability(0.5)).toBe("0.500000");
    expect(formatProbability(0)).toBe("0.000000");
    expect(formatProbability(1)).toBe("1.000000");
  });

  it("rounds rather than truncates", () => {
    expect(formatProbability(0.1234567)).toBe("0.123457");
    expect(formatProbability(0.9999996)).toBe("1.000000");
  });

  it("always matches the d.dddddd shape for unit-interval input", () => {
    const values = [0, 0.000001, 0.25, 0.3833334, 0.954671, 1];
    for (const value of values) {
      expect(formatProbability(value)).toMatch(/^\d\.\d{6}$/);
    }
  });
});

describe("clamp01", () => {
  it("passes through in-range values and clamps the rest", () => {
    expect(clamp01(0.4)).toBe(0.4);
    expect(clamp01(-3)).toBe(0);
    expect(clamp01(7)).toBe(1);
    expect(clamp01(Number.NaN)).toBe(0);
  });
});

describe("shade scaling", () => {
  it("is darkest at the maximum shade", () => {
    expect(shadeToLightness(1)).toBeLessThan(shadeToLightness(0.99));
    expect(shadeToLightness(1)).toBe(33);
    expect(shadeToLightness(0)).toBe(95);
  });

  it("never gets lighter as the shade grows", () => {
    let previous = shadeToLightness(0);
    for (let i = 1; i <= 20; i += 1) {
      const next = shadeToLightness(i / 20);
      expect(next).toBeLessThanOrEqual(previous);
      previous = next;
    }
  });

  it("clamps out-of-range shades instead of producing bad colors", () => {
    expect(shadeToColor(-0.5)).toBe(shadeToColor(0));
    expect(shadeToColor(1.5)).toBe(shadeToColor(1));
    expect(shadeToColor(Number.NaN)).toBe(shadeToColor(0));
  });

  it("emits an hsl color embedding the lightness", () => {
    expect(shadeToColor(1)).toBe("hsl(213 62% 33%)");
    expect(shadeToColor(0)).toBe("hsl(213 62% 95%)");
  });

  it("keeps text readable on both light and dark cells", () => {
    expect(shadeTextColor(1)).toBe("#f5f7fa");
    expect(shadeTextColor(0)).toBe("#1f2a37");
  });
});

describe("groupColor", () => {
  it("gives the first few groups distinct colors", () => {
    const seen = new Set<string>();
    for (let i = 0; i < 8; i += 1) seen.add(groupColor(i));
    expect(seen.size).toBe(8);
  });

  it("cycles for large indices instead of failing", () => {
    expect(groupColor(8)).toBe(groupColor(0));
    expect(groupColor(19)).toBe(groupColor(3));
  });
});

/** Rating vocabulary shared with the service: property names, fabric list,
 * and the anchor cloths shown next to each Likert scale. Indices into the
 * fabric list are 1-based to match the logged `similar_fabric` field. */

export const LIKERT_PROPERTIES = ["roughness", "thickness", "stiffness", "warmth"] as const;
export type LikertProperty = (typeof LIKERT_PROPERTIES)[number];

export const FABRIC_CATALOG = [
  "Marquisette",
  "Cashmere",
  "Satin",
  "Milanese",
  "Faille",
  "Viyella",
  "Metallic Tone Cloth",
  "Georgette",
  "Dungaree",
  "Quilting",
  "Paisley",
  "Velveteen",
  "Chenille",
  "Cambric",
  "Cord Weave",
  "Blister Cloth",
] as const;

export const CRITERIA_CLOTHS: Record<LikertProperty, readonly [string, string, string]> = {
  roughness: ["Jeans", "Voile", "Gauze"],
  stiffness: ["Towelling", "Gauze", "Voile"],
  thickness: ["Jeans", "Towelling", "Gauze"],
  warmth: ["Towelling", "Jeans", "Voile"],
};

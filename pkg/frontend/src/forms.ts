/** Question A form: four 5-point Likert scales, acceptability toggle,
 * free-text note, and the 16-fabric picker grid. Reading the form performs
 * client-side validation; an incomplete form yields errors and no payload. */

import { CRITERIA_CLOTHS, FABRIC_CATALOG, LIKERT_PROPERTIES } from "./catalog.js";

export interface FormReading {
  payload: {
    likert: Record<string, number>;
    acceptable: boolean;
    free_text: string;
    similar_fabric: number;
  } | null;
  errors: string[];
}

export interface ResponseForm {
  element: HTMLFormElement;
  read(): FormReading;
  reset(): void;
}

function likertRow(doc: Document, property: string): HTMLElement {
  const row = doc.createElement("fieldset");
  row.className = "likert-row";
  row.dataset.property = property;
  const legend = doc.createElement("legend");
  const anchors = CRITERIA_CLOTHS[property as keyof typeof CRITERIA_CLOTHS];
  legend.textContent = `${property} (1 = like ${anchors[2]}, 5 = like ${anchors[0]})`;
  row.appendChild(legend);
  for (let score = 1; score <= 5; score++) {
    const label = doc.createElement("label");
    const input = doc.createElement("input");
    input.type = "radio";
    input.name = `likert-${property}`;
    input.value = String(score);
    label.appendChild(input);
    label.appendChild(doc.createTextNode(String(score)));
    row.appendChild(label);
  }
  return row;
}

export function buildResponseForm(doc: Document): ResponseForm {
  const form = doc.createElement("form");
  form.className = "response-form";
  // Submission is wired up by the app shell; never navigate.
  form.addEventListener("submit", (ev) => ev.preventDefault());

  for (const property of LIKERT_PROPERTIES) form.appendChild(likertRow(doc, property));

  const acceptable = doc.createElement("label");
  acceptable.className = "acceptable";
  const acceptableInput = doc.createElement("input");
  acceptableInput.type = "checkbox";
  acceptableInput.name = "acceptable";
  acceptable.appendChild(acceptableInput);
  acceptable.appendChild(doc.createTextNode("acceptable as a cloth sensation"));
  form.appendChild(acceptable);

  const note = doc.createElement("textarea");
  note.name = "free_text";
  note.placeholder = "free-form impression";
  form.appendChild(note);

  const grid = doc.createElement("fieldset");
  grid.className = "fabric-grid";
  const legend = doc.createElement("legend");
  legend.textContent = "most similar fabric";
  grid.appendChild(legend);
  FABRIC_CATALOG.forEach((name, i) => {
    const label = doc.createElement("label");
    const input = doc.createElement("input");
    input.type = "radio";
    input.name = "similar_fabric";
    input.value = String(i + 1);
    label.appendChild(input);
    label.appendChild(doc.createTextNode(`${i + 1}. ${name}`));
    grid.appendChild(label);
  });
  form.appendChild(grid);

  const read = (): FormReading => {
    const errors: string[] = [];
    const likert: Record<string, number> = {};
    for (const property of LIKERT_PROPERTIES) {
      const checked = form.querySelector<HTMLInputElement>(
        `input[name="likert-${property}"]:checked`,
      );
      if (!checked) errors.push(`rate ${property}`);
      else likert[property] = Number(checked.value);
    }
    const fabric = form.querySelector<HTMLInputElement>(
      'input[name="similar_fabric"]:checked',
    );
    if (!fabric) errors.push("pick the most similar fabric");
    if (errors.length > 0) return { payload: null, errors };
    return {
      payload: {
        likert,
        acceptable: acceptableInput.checked,
        free_text: note.value,
        similar_fabric: Number(fabric!.value),
      },
      errors: [],
    };
  };

  return { element: form, read, reset: () => form.reset() };
}

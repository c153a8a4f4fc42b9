import fixturesJson from "./fixtures/api.json";

export const fixtures = fixturesJson as any;

/** Pull one attribute value out of every tag matching `tagPattern`. */
export function attrValues(html: string, tagPattern: RegExp, attr: string): string[] {
  const out: string[] = [];
  for (const m of html.match(tagPattern) ?? []) {
    const a = m.match(new RegExp(`${attr}="([^"]*)"`));
    if (a) out.push(a[1]);
  }
  return out;
}

export function attrValue(html: string, tagPattern: RegExp, attr: string): string | null {
  return attrValues(html, tagPattern, attr)[0] ?? null;
}

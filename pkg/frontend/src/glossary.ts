// Term definitions shown on the real-time page's Glossary tab.

export const GLOSSARY: { term: string; definition: string }[] = [
  {
    term: "Electricity vulnerability index",
    definition:
      "Ordinal ranking of zip codes built from seven socio-demographic " +
      "features (elderly share, cooling centers, affordable housing " +
      "buildings and units, poverty share, children under five, average " +
      "caregivers). Each feature is rescaled to 0..1 across all zips and " +
      "the seven values are summed with equal weight.",
  },
  {
    term: "ZCR (zip code ranking)",
    definition:
      "A zip code's position among all loaded zip codes when sorted by " +
      "vulnerability score, from 1 (most vulnerable) to Z.",
  },
  {
    term: "OSR (overall severity ranking)",
    definition:
      "An active outage's position among all currently active outages, " +
      "from 1 to N, ordered by how vulnerable its zip code is.",
  },
  {
    term: "Color band",
    definition:
      "Marker color derived from ZCR: ranks 1-50 red, 51-100 orange, " +
      "101-150 yellow, 151-200 green, 201 and beyond blue.",
  },
  {
    term: "Lifecycle stages",
    definition:
      "Crawled: present in the latest source snapshot. Processed: active " +
      "and enriched with zip and borough. Historical: no longer reported, " +
      "stamped with the time of the first snapshot that omitted it.",
  },
  {
    term: "Time step",
    definition:
      "Fixed-duration bucket (two hours by default) into which outage " +
      "start times are counted for the temporal analyses.",
  },
  {
    term: "Transition matrix",
    definition:
      "Nonnegative matrix fitted on consecutive per-cluster outage count " +
      "vectors; multiplying it by the current vector yields the expected " +
      "counts for the next time step.",
  },
  {
    term: "Influence graph",
    definition:
      "Directed graph over the cluster centroids whose arrows are the " +
      "largest transition-matrix weights, pointing from the time-t cluster " +
      "to the time-t+1 cluster. Self-influence is drawn as a ring.",
  },
  {
    term: "Borough",
    definition:
      "One of the five administrative divisions: Bronx, Brooklyn, " +
      "Manhattan, Queens, Staten Island.",
  },
];

export function renderGlossary(): string {
  const items = GLOSSARY.map(
    (entry) => `<dt>${entry.term}</dt><dd>${entry.definition}</dd>`,
  );
  return `<dl class="glossary">${items.join("")}</dl>`;
}

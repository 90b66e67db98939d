// Display formatting.  The objective is passed through verbatim from the
// plan payload -- the client never recomputes costs -- and rendered with the
// same fixed precision the command line prints.

export function formatObjective(objective: number): string {
  return objective.toFixed(6);
}

export function formatMillis(ms: number): string {
  return ms >= 1000 ? `${(ms / 1000).toFixed(1)} s` : `${Math.round(ms)} ms`;
}

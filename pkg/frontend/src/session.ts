// Session context: who is using the console and which views they get.
// The auth token lives in the ApiClient closure and is never rendered.

export type Role = 'Victim' | 'Verifier' | 'Admin';

export interface SessionContext {
  actor: string;
  role: Role;
}

export type ViewName = 'report' | 'cases' | 'alerts' | 'queue' | 'certificate' | 'admin';

const VIEWS_BY_ROLE: Record<Role, ViewName[]> = {
  Victim: ['report', 'cases', 'alerts', 'certificate'],
  Verifier: ['queue', 'certificate'],
  Admin: ['cases', 'certificate', 'admin'],
};

export function visibleViews(role: Role): ViewName[] {
  return [...VIEWS_BY_ROLE[role]];
}

// Console root: token sign-in, role-gated navigation, view mounting.

import { ApiClient } from './api.js';
import { renderAdminPanel } from './admin.js';
import { renderMyCases } from './cases.js';
import { renderCertificateChecker } from './certificate.js';
import { clear, el } from './dom.js';
import { renderBallotQueue } from './queue.js';
import { Role, SessionContext, ViewName, visibleViews } from './session.js';
import { renderReportWizard } from './wizard.js';

export interface ConsoleConfig {
  apiBaseUrl: string;
  platformPublicKeyHex: string;
}

export interface MountedConsole {
  session: SessionContext;
  show: (view: ViewName) => Promise<void>;
  root: HTMLElement;
}

export function mountConsole(
  doc: Document,
  container: HTMLElement,
  config: ConsoleConfig,
  signIn: { actor: string; role: Role; token: string },
): MountedConsole {
  const api = new ApiClient(config.apiBaseUrl, signIn.token);
  const session: SessionContext = { actor: signIn.actor, role: signIn.role };

  const root = el(doc, 'div', { class: 'console' });
  const header = el(doc, 'header', {}, [
    el(doc, 'strong', {}, ['redress console']),
    // actor and role only; the bearer token must never reach the DOM
    el(doc, 'span', { class: 'whoami' }, [` ${session.actor} (${session.role})`]),
  ]);
  const nav = el(doc, 'nav', {});
  const main = el(doc, 'main', {});
  root.append(header, nav, main);
  container.append(root);

  const wizardDeps = { myCases: renderMyCases(doc, api) };

  const builders: Record<ViewName, () => Promise<HTMLElement>> = {
    report: async () =>
      renderReportWizard(doc, api, {
        onFiled: (filed) => wizardDeps.myCases.track(filed.case.case_id),
      }),
    cases: async () => {
      await wizardDeps.myCases.refresh();
      return wizardDeps.myCases.root;
    },
    alerts: async () => {
      const section = el(doc, 'section', { class: 'alerts' }, [el(doc, 'h2', {}, ['Alerts'])]);
      const feed = await api.getAlerts(session.actor);
      for (const alert of feed.alerts) {
        section.append(
          el(doc, 'p', { class: 'alert' }, [
            `${alert.created_at}: contact from ${alert.sender}, linked to ${alert.linked_account} — ${alert.reason}`,
          ]),
        );
      }
      if (feed.alerts.length === 0) {
        section.append(el(doc, 'p', { class: 'empty' }, ['No alerts.']));
      }
      return section;
    },
    queue: async () => {
      const queue = renderBallotQueue(doc, api);
      await queue.refresh();
      return queue.root;
    },
    certificate: async () =>
      renderCertificateChecker(doc, api, config.platformPublicKeyHex),
    admin: async () => renderAdminPanel(doc, api),
  };

  for (const view of visibleViews(session.role)) {
    const button = el(doc, 'button', { type: 'button', 'data-view': view }, [view]);
    button.addEventListener('click', () => void show(view));
    nav.append(button);
  }

  async function show(view: ViewName): Promise<void> {
    if (!visibleViews(session.role).includes(view)) {
      throw new Error(`view ${view} is not available to role ${session.role}`);
    }
    clear(main);
    main.append(await builders[view]());
  }

  return { session, show, root };
}

// Browser bootstrap: read config, offer a token sign-in form, mount the app.

import { mountConsole } from './app.js';
import { el } from './dom.js';
import { Role } from './session.js';

const config = {
  apiBaseUrl: (window as any).REDRESS_API_BASE ?? 'http://127.0.0.1:8800',
  platformPublicKeyHex: (window as any).REDRESS_PLATFORM_KEY ?? '',
};

const container = document.getElementById('app');
if (container) {
  const form = el(document, 'form', { class: 'sign-in' });
  const actor = el(document, 'input', { name: 'actor', placeholder: 'account id' });
  const role = el(document, 'select', { name: 'role' });
  for (const name of ['Victim', 'Verifier', 'Admin']) {
    role.append(el(document, 'option', { value: name }, [name]));
  }
  const token = el(document, 'input', {
    name: 'token',
    type: 'password',
    placeholder: 'access token',
  });
  const enter = el(document, 'button', { type: 'submit' }, ['Enter']);
  form.append(
    el(document, 'label', {}, ['Account ', actor]),
    el(document, 'label', {}, ['Role ', role]),
    el(document, 'label', {}, ['Token ', token]),
    enter,
  );
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    form.remove();
    const mounted = mountConsole(document, container, config, {
      actor: actor.value.trim(),
      role: role.value as Role,
      token: token.value,
    });
    const first = mounted.session.role === 'Verifier' ? 'queue' : 'report';
    void mounted.show(mounted.session.role === 'Admin' ? 'admin' : first);
  });
  container.append(form);
}

/** Small DOM construction helpers; no framework. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function button(
  label: string,
  onClick: () => void,
  attrs: Record<string, string> = {},
): HTMLButtonElement {
  const node = el('button', attrs, label);
  node.addEventListener('click', onClick);
  return node;
}

/** Render an error banner into a host element. */
export function errorBanner(host: HTMLElement, message: string): void {
  clear(host).appendChild(el('div', { class: 'error-banner' }, message));
}

export function fmtPercent(value: number | null): string {
  return value === null ? '-' : value.toFixed(3);
}

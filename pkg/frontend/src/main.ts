import { mount } from './app.js';

declare global {
  interface Window {
    LCM_API_BASE?: string;
  }
}

document.addEventListener('DOMContentLoaded', () => {
  const root = document.getElementById('root');
  if (root) mount(root, window.LCM_API_BASE ?? '');
});

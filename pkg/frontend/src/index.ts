export * from './types.js';
export * from './state.js';
export * from './embedding.js';
export * from './preview.js';
export * from './drawer.js';
export * from './panel.js';
export * from './render.js';
export { ApiClient, ApiError } from './api.js';
export { App, bootstrap, LAYOUT_POLL_MS } from './app.js';

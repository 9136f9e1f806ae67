import streamlit as st
from src.ui.cloud_upload import render_cloud_upload_ui
from src.ui.results import render_results_ui


def main():
    st.set_page_config(
        page_title="Segmentación few-shot de nubes",
        page_icon="☁️",
        layout="wide",
        initial_sidebar_state="expanded"
    )
    st.title("Segmentación few-shot y zero-shot de nubes de puntos")

    menu = st.sidebar.selectbox(
        "Menú",
        options=["Inicio", "Cargar Nubes", "Resultados"],
        index=0
    )

    if menu == "Inicio":
        st.write("Panel para inspeccionar nubes y resultados de entrenamiento")
        st.write("El entrenamiento y la evaluación se lanzan desde la línea de comandos (`python cli.py --help`).")

        col1, col2 = st.columns(2)
        with col1:
            st.info("📤 **Cargar Nubes**\n\n"
                    "Sube nubes EPC o CSV y revisa sus clases")
        with col2:
            st.info("📊 **Resultados**\n\n"
                    "Curvas de pérdidas, IoU por clase y espectros de features")

    elif menu == "Cargar Nubes":
        render_cloud_upload_ui()

    elif menu == "Resultados":
        render_results_ui()


if __name__ == "__main__":
    main()
